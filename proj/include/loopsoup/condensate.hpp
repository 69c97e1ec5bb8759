#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loopsoup/thermo.hpp"

namespace loopsoup {

struct HYLParams {
  double a = 0.0;
  double b = 1.0;

  // Canonical operations only use the counter-term strength b.
  void validate_canonical() const;
  // Grand-canonical operations need a > b > 0.
  void validate_grand_canonical() const;
};

enum class Branch { zero, interior, coexistence };
std::string to_string(Branch b);

struct CondensateSolution {
  double rho_total = 0.0;
  double rho_e = 0.0;
  double rho_S = 0.0;
  double rho_bar = 0.0;
  double S_value = 0.0;  // S_0 when rho_total > ρ_c, S_1 otherwise
  double S_1 = 0.0;      // S_value + bβρ_e²/2
  Branch branch = Branch::zero;
  double objective_curvature = 0.0;  // R'' at the maximiser (0 on the zero branch)
  std::optional<double> coexisting_rho_S;  // interior candidate when branch == coexistence
};

// R(x): Q(x) − I(ρ_c − x) above ρ_c, bβx²/2 − I(ρ_o − x) below, with
// Q(t) = (βb/2)[(t + ρ_e)² − ρ_e²]. x ∈ [0, min(ρ_o, ρ_c)].
double excess_objective(const ModelParams& p, const HYLParams& hyl, double rho_o, double x);
double excess_objective_prime(const ModelParams& p, const HYLParams& hyl, double rho_o, double x);
double excess_objective_second(const ModelParams& p, const HYLParams& hyl, double rho_o, double x);

CondensateSolution solve_rho_bar(const ModelParams& p, const HYLParams& hyl, double rho);

struct CriticalHYL {
  double rho_c_hyl;
  double jump_size;
};
CriticalHYL critical_density_hyl(const ModelParams& p, const HYLParams& hyl);

// 1/𝛒'(0); DivergenceError for d = 3, 4 where every b > 0 shifts the transition.
double b_critical(const ModelParams& p);

double free_energy(const ModelParams& p, const HYLParams& hyl, double rho);

// J(ρ) = βμρ − βaρ²/2 + S_1(ρ), the exponent of the grand-canonical density law.
double gc_objective(const ModelParams& p, const HYLParams& hyl, double mu, double rho);
double rho_gc(const ModelParams& p, const HYLParams& hyl, double mu);
double pressure_hyl(const ModelParams& p, const HYLParams& hyl, double mu);
// Maximiser of βμρ − βaρ²/2 − I_0(ρ), the mean-field (b = 0) density; needs a > 0.
double rho_mean_field(const ModelParams& p, double a, double mu);

// ---- general mean-field classifier ----

enum class GmfPhase { subcritical, supercritical, at_rc };
std::string to_string(GmfPhase ph);

struct GmfOptions {
  double mu_ref = 0.0;
  double x_max = 1.0;
  int grid_points = 10000;
  int refinement_rounds = 3;
  double tie_tol = 1e-12;       // relative tolerance for "equal to the minimum"
  double level_delta = 1e-6;    // level-set check: {F ≤ L + δ} ...
  double level_eps = 0.05;      // ... must sit within ε·x_max of x_min
};

struct GmfLimit {
  std::optional<double> mu;                    // 𝛍(x_min) below ρ_c
  std::optional<double> interlacement_density; // x_min − ρ_c above ρ_c
};

struct GmfResult {
  double x_min;
  double L;
  GmfPhase phase;
  GmfLimit limiting_params;
  bool non_unique;
  std::vector<double> near_minimisers;  // grid locations of separate near-minimal clusters
  bool level_set_condition;
};

GmfResult gmf_solve(const ModelParams& p, const std::function<double(double)>& G, const GmfOptions& opt = {});

// (x, value) table with linear interpolation; +∞ outside the tabulated range.
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> x, std::vector<double> y);
  static TabulatedFunction from_csv(const std::string& path);
  double operator()(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_;
};

}  // namespace loopsoup
