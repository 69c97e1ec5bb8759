#pragma once

#include <cstdint>

namespace loopsoup {

struct PrecisionPolicy {
  double rel_tol = 1e-12;
  std::int64_t max_terms = 10'000'000;

  void validate() const;
};

// Li_s(z) = Σ_{j≥1} z^j / j^s for real s > 0 and z ∈ [0, 1].
double polylog(double s, double z, const PrecisionPolicy& policy = {});

// Riemann zeta for s > 1.
double zeta(double s);

// Lower branch of the Lambert W function on [−1/e, 0).
double lambert_w_m1(double x, const PrecisionPolicy& policy = {});

// Return probability density of a Brownian bridge of duration βj at the origin.
double bridge_return_weight(int d, double beta, std::int64_t j);

// (2π)^{-d/2}
double c_d(int d);

}  // namespace loopsoup
