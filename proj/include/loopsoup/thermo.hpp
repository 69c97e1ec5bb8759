#pragma once

#include <cstdint>
#include <optional>

#include "loopsoup/special_functions.hpp"

namespace loopsoup {

struct ModelParams {
  int d = 3;
  double beta = 1.0;

  void validate() const;
  double cd() const { return c_d(d); }
};

struct ThermoPoint {
  double mu;
  double pressure;
  double density;
  std::optional<double> density_prime;  // absent where 𝛒' diverges (μ = 0, d = 3, 4)
};

double pressure(const ModelParams& p, double mu);
double density(const ModelParams& p, double mu);
double critical_density(const ModelParams& p);
double density_prime(const ModelParams& p, double mu);
ThermoPoint thermo_point(const ModelParams& p, double mu);

// Inverse of 𝛒 on (0, ρ_c], extended by 0 above ρ_c.
double mu_of_rho(const ModelParams& p, double rho);

// Rate function I_μ(x) of the free particle density; +∞ for x < 0.
double rate_I(const ModelParams& p, double mu_ref, double x);
// I'(x) = β(𝛍(x) − μ_ref) on (0, ρ_c).
double rate_I_prime(const ModelParams& p, double mu_ref, double x);
// I''(x) = β/𝛒'(𝛍(x)) on (0, ρ_c).
double rate_I_second(const ModelParams& p, double x);

// Truncated series: only loops of length j ≤ q contribute.
double pressure_q(const ModelParams& p, std::int64_t q, double mu);
double density_q(const ModelParams& p, std::int64_t q, double mu);
double mu_of_rho_q(const ModelParams& p, std::int64_t q, double rho);
double rate_I_q(const ModelParams& p, std::int64_t q, double mu_ref, double x);

// Gnedenko scale of the particle-number fluctuations in volume V.
double a_scale(const ModelParams& p, double volume);

enum class AsymptoticKind { density_near_0, mu_near_rc, rate_near_rc };

struct AsymptoticComparison {
  double exact;
  double asymptotic;  // leading term of the closed form under test
  double ratio;
  double corrected_asymptotic;  // leading term re-derived from the exact series
  double corrected_ratio;
};

// density_near_0 compares ρ_c − 𝛒(−h); mu_near_rc compares 𝛍(ρ_c − h);
// rate_near_rc compares I_0(ρ_c − h).
AsymptoticComparison asymptotics_validator(const ModelParams& p, AsymptoticKind kind, double h);

}  // namespace loopsoup
