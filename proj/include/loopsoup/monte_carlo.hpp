#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "loopsoup/finite_volume.hpp"

namespace loopsoup {

struct MoveWeights {
  double split = 1.0 / 3.0;
  double merge = 1.0 / 3.0;
  double reslice = 1.0 / 3.0;
};

struct SamplerConfig {
  std::uint64_t seed = 1;
  int n_chains = 1;
  std::int64_t sweeps = 10000;
  std::int64_t burn_in = 1000;
  MoveWeights move_weights;
  double exchange_probability = 0.25;  // grand-canonical insert/delete/resize share of proposals
  std::int64_t steps_per_sweep = 0;    // 0: N (canonical) or ⌈V/4⌉ (grand-canonical)
  std::int64_t insert_jmax = 0;        // 0: ⌈V⌉

  void validate() const;
};

struct EstimateReport {
  double mean = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  std::map<std::string, double> acceptance_rates;
  std::int64_t samples = 0;
  int n_chains = 0;
  double bimodality_coefficient = 0.0;  // (skew² + 1)/kurtosis; > 5/9 hints at two modes
};

enum class Ensemble { canonical, grand_canonical };
enum class Interaction { free, pmf, hyl };
std::string to_string(Interaction i);

// Loop lengths with O(1) uniform selection and occupation lookup.
class CycleState {
 public:
  CycleState() = default;
  // q splits loops into short (< q) and long (≥ q) for the N_long bookkeeping.
  CycleState(const CycleCounts& c, std::int64_t q);

  std::int64_t K() const { return static_cast<std::int64_t>(loops_.size()); }
  std::int64_t N() const { return N_; }
  std::int64_t n(std::int64_t j) const { return j < static_cast<std::int64_t>(counts_.size()) ? counts_[j] : 0; }
  std::int64_t loop(std::int64_t idx) const { return loops_[idx]; }
  std::int64_t largest() const;
  std::int64_t long_mass() const { return long_mass_; }
  CycleCounts counts() const;

  void remove_at(std::int64_t idx);
  void add(std::int64_t j);

 private:
  std::vector<std::int64_t> loops_;
  std::vector<std::int64_t> counts_;
  std::int64_t q_ = 1;
  std::int64_t N_ = 0;
  std::int64_t long_mass_ = 0;
};

enum class MoveType { none, split, merge, reslice, insert, remove, resize };
std::string to_string(MoveType t);

// A proposed change of the loop multiset. Indices refer to the loops removed
// in the current state (only needed to apply the move).
struct MoveChange {
  MoveType type = MoveType::none;
  std::vector<std::int64_t> removed;
  std::vector<std::int64_t> added;
  std::vector<std::int64_t> removed_idx;
};

// Target law and proposal mechanism. The same object draws proposals and
// evaluates their exact probabilities, so detailed balance can be checked by
// enumeration on small state spaces.
class ProposalKernel {
 public:
  ProposalKernel(const FiniteVolumeModel& m, Ensemble e, Interaction inter, const SamplerConfig& cfg);

  double log_lambda(std::int64_t j) const;
  // log π up to a constant: Σ [n_j log λ_j − log n_j!] + (bβ/2V)Σ_{k≥q} k²n_k² − (aβ/2V)N².
  double log_target(const CycleCounts& c) const;
  double delta_log_target(const CycleState& s, const MoveChange& c) const;
  // Probability that one proposal from `s` produces the multiset change c.
  double proposal_probability(const CycleState& s, const MoveChange& c) const;
  double proposal_probability(const CycleCounts& s, const MoveChange& c) const;
  // log acceptance ratio log[π(y)q(y→x) / π(x)q(x→y)].
  double log_acceptance(const CycleState& s, const MoveChange& c) const;
  double log_acceptance(const CycleCounts& s, const MoveChange& c) const;
  double energy(const CycleState& s) const;

  MoveChange draw(const CycleState& s, std::mt19937_64& rng) const;

  const FiniteVolumeModel& model() const { return m_; }
  Ensemble ensemble() const { return ens_; }
  std::int64_t insert_jmax() const { return jmax_; }

 private:
  template <class CountFn>
  double prob_impl(CountFn n, std::int64_t K, const MoveChange& c) const;
  double step_probability(std::int64_t s) const;

  FiniteVolumeModel m_;
  Ensemble ens_;
  Interaction inter_;
  MoveWeights w_;
  double p_exchange_;
  double geo_p_;
  std::int64_t jmax_;
  std::vector<double> insert_cdf_;
  std::vector<double> insert_logp_;
  mutable std::vector<double> log_lambda_cache_;
};

// Multiset difference x → y as a MoveChange (type none when no single move produces it).
MoveChange change_between(const CycleCounts& x, const CycleCounts& y);

// Partitions of N as cycle-count maps.
std::vector<CycleCounts> partitions_of(std::int64_t N);

class Chain {
 public:
  Chain(const ProposalKernel& k, CycleState init, std::uint64_t seed);
  void step();
  void sweep(std::int64_t steps);
  const CycleState& state() const { return s_; }
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acceptance() const { return acc_; }

 private:
  const ProposalKernel& k_;
  CycleState s_;
  std::mt19937_64 rng_;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acc_;  // move -> (accepted, proposed)
};

struct TraceRow {
  int chain;
  std::int64_t sweep;
  std::int64_t N;
  std::int64_t N_long;
  std::int64_t largest;
  double energy;
};

using SampleVisitor = std::function<void(int chain, std::int64_t sweep, const CycleState& s)>;

// Streams post-burn-in states of every chain, chain by chain.
void sample_canonical_hyl(const FiniteVolumeModel& m, std::int64_t N, const SamplerConfig& cfg, const SampleVisitor& visit);
void sample_grand_canonical(const FiniteVolumeModel& m, const SamplerConfig& cfg, Interaction inter,
                            const SampleVisitor& visit);

EstimateReport estimate_long_density(const FiniteVolumeModel& m, std::int64_t N, const SamplerConfig& cfg,
                                     std::vector<TraceRow>* trace = nullptr);
// Mean particle density N/V under the grand-canonical measure.
EstimateReport estimate_gc_density(const FiniteVolumeModel& m, const SamplerConfig& cfg, Interaction inter,
                                   std::vector<TraceRow>* trace = nullptr);

// Combines per-chain observable series into an estimate (batch means per chain).
EstimateReport summarize_series(const std::vector<std::vector<double>>& series);

std::uint64_t chain_seed(std::uint64_t seed, int chain);

}  // namespace loopsoup
