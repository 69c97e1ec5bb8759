#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "loopsoup/condensate.hpp"

namespace loopsoup {

// Densities x_1..x_jmax of loops of each length (x[0] holds x_1).
struct CycleDensityVector {
  std::vector<double> x;

  std::size_t jmax() const { return x.size(); }
  double D() const;  // Σ j·x_j
  void validate() const;
};

// 𝓘(x) = Σ x_j(log(j x_j/p_j) − 1) − μβD + (aβ/2)D² − (bβ/2)Σ j²x_j²
//        − (β/(2(a−b)))(μ − aD)₊² − P(0) + p_tilde, with 0·log 0 = 0.
double full_rate(const ModelParams& p, const HYLParams& hyl, double mu, const CycleDensityVector& x, double p_tilde);
std::vector<double> full_rate_gradient(const ModelParams& p, const HYLParams& hyl, double mu, const CycleDensityVector& x);

// Extra smooth term added to 𝓘 during minimisation. The Hessian is assumed diagonal.
struct RateAddon {
  std::function<double(const std::vector<double>&)> value;
  std::function<void(const std::vector<double>&, std::vector<double>&)> add_gradient;
  std::function<void(const std::vector<double>&, std::vector<double>&)> add_hessian_diag;
};

// (coeff/2)·x_1²
RateAddon x1_quadratic_addon(double coeff);

struct MinimizeOptions {
  double grad_tol = 1e-8;
  int max_iter = 5000;
};

struct FullRateMinimum {
  CycleDensityVector x_star;
  double value;      // minimum of 𝓘 (plus addon) with p_tilde = 0
  double grad_norm;  // max_j |∂_j| at x_star
  int iterations;
  int start;         // index of the multistart that won
};

FullRateMinimum minimize_full_rate(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax,
                                   const std::optional<RateAddon>& addon = std::nullopt,
                                   const MinimizeOptions& opt = {});

// p_tilde that makes min 𝓘 = 0.
double calibrated_p_tilde(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax);

struct PressureGap {
  double gap;          // −(1/β)[inf(𝓘 + (bβ/2)x_1²) − inf 𝓘]
  double lower_bound;  // −(b/2)(x_1*)² with x* the minimiser of 𝓘
  double x1_star;
  double min_rate;
  double min_with_addon;
  std::size_t jmax_used;
  double grad_norm;
};

// With auto_double, jmax doubles until the gap is stable to stability_tol.
PressureGap pressure_gap(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax = 500,
                         bool auto_double = true, double stability_tol = 1e-8);

}  // namespace loopsoup
