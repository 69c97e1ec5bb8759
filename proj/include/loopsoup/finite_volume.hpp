#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loopsoup/condensate.hpp"

namespace loopsoup {

struct FiniteVolumeModel {
  double V = 1000.0;
  ModelParams params;
  std::int64_t q = 1;
  HYLParams hyl;
  double mu = 0.0;  // chemical potential of the loop intensities; exact laws need mu <= 0

  void validate() const;
  // Human-readable notes when q leaves the window (a_scale(V), V).
  std::vector<std::string> warnings() const;
  static std::int64_t default_q(double V);
};

struct CycleCounts {
  std::map<std::int64_t, std::int64_t> counts;  // loop length -> occupation

  std::int64_t N() const;
  std::int64_t N_short(std::int64_t q) const;
  std::int64_t N_long(std::int64_t q) const;
  std::int64_t largest() const;
  void validate() const;
};

double intensity(const FiniteVolumeModel& m, std::int64_t j);
double log_intensity(const FiniteVolumeModel& m, std::int64_t j);
// Σ_{j≥1} λ_j = V·P(μ) and Σ_{j≥q} λ_j.
double total_intensity(const FiniteVolumeModel& m);
double long_intensity(const FiniteVolumeModel& m);

// log P(N_Λ = n), n = 0..N_max, including the full normaliser exp(−Σλ_j).
std::vector<double> free_canonical_log_pmf(const FiniteVolumeModel& m, std::int64_t N_max);
std::vector<double> free_canonical_pmf(const FiniteVolumeModel& m, std::int64_t N_max);
// Same law restricted to loops shorter than q.
std::vector<double> short_log_pmf(const FiniteVolumeModel& m, std::int64_t N_max);

enum class LongSectorMethod { dynamic_programming, enumeration };

constexpr std::int64_t kDefaultEnumerationCap = 10'000'000;

// log of exp(−Σ_{j≥q}λ_j)·Σ_{long configurations of mass x} Π_k λ_k^{n_k}/n_k! · exp(coupling·Σ k²n_k²)
// for x = 0..M. coupling = 0 gives log P(N^long = x).
std::vector<double> long_sector_log_weights(const FiniteVolumeModel& m, std::int64_t M, double coupling,
                                            LongSectorMethod method = LongSectorMethod::dynamic_programming,
                                            std::int64_t cap = kDefaultEnumerationCap);

double long_mass_pmf(const FiniteVolumeModel& m, std::int64_t x,
                     LongSectorMethod method = LongSectorMethod::dynamic_programming,
                     std::int64_t cap = kDefaultEnumerationCap);

struct CanonicalPartition {
  double log_Z;            // joint weight: Σ_m L_b(m)·P_short(N − m); equals log P(N_Λ = N) when b = 0
  double log_free_pmf;     // log P(N_Λ = N)
  double log_Z_canonical;  // log E^Can[e^{−βH}] = log_Z − log_free_pmf
  std::vector<std::pair<std::int64_t, double>> long_spectrum;  // (N_long, log weight)
};

CanonicalPartition canonical_hyl_partition(const FiniteVolumeModel& m, std::int64_t N,
                                           LongSectorMethod method = LongSectorMethod::dynamic_programming,
                                           std::int64_t cap = kDefaultEnumerationCap);

// log of √(1+b/𝛍'(ρ_c−ρ_S))·e^{S_1 V}·βVc_d/(βρ̄V)^{d/2+1}, the large-V form of the joint
// weight at density rho (supercritical).
double log_partition_asymptotic(const FiniteVolumeModel& m, double rho);

// E[N_long]/V under the canonical HYL measure with N particles.
double long_loop_density_exact(const FiniteVolumeModel& m, std::int64_t N);

struct ShortSectorCheck {
  double pmf_short;
  double pmf_full;
  double ratio;
};
// Requires y ≤ (ρ_c − eps)·V.
ShortSectorCheck short_sector_check(const FiniteVolumeModel& m, std::int64_t y, double eps = 0.0);

// log Z_joint(N) for N = 0..N_max (the b-tilted joint weight of every particle number).
std::vector<double> joint_log_partition(const FiniteVolumeModel& m, std::int64_t N_max);

struct DensityMoments {
  double mean;
  double sd;
};
// Exact finite-volume grand-canonical density law P(N) ∝ exp(βμN − βaN²/2V)·Z_joint(N),
// truncated at N_max. The model's own mu must be 0 here; mu_gc is the tilt.
DensityMoments grand_canonical_density_exact(const FiniteVolumeModel& m, double mu_gc, std::int64_t N_max);

// Online log-sum-exp accumulator.
class LogSum {
 public:
  void add(double t);
  double value() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace loopsoup
