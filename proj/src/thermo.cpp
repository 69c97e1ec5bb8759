#include "loopsoup/thermo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_mu(double mu, const char* who) {
  if (!(mu <= 0.0)) throw DomainError(std::string(who) + ": requires mu <= 0");
}

// Prefactor (2πβ)^{-d/2} = c_d β^{-d/2}.
double thermal_prefactor(const ModelParams& p) { return std::pow(2.0 * std::numbers::pi * p.beta, -0.5 * p.d); }

// Σ_{j=1}^{q} z^j j^{-s}, cut early once the remaining terms are negligible.
double truncated_series(double s, double z, std::int64_t q) {
  double sum = 0.0;
  double zj = 1.0;
  for (std::int64_t j = 1; j <= q; ++j) {
    zj *= z;
    double jd = static_cast<double>(j);
    double term = zj * std::exp(-s * std::log(jd));
    sum += term;
    if (z < 1.0 && term * z / (1.0 - z) < 1e-18 * sum) break;
  }
  return sum;
}

// Solves g(μ) = 0 for μ ∈ [lo, 0] where g is increasing, g(lo) < 0 ≤ g(0).
template <class F>
double solve_increasing(F g, double lo) {
  double flo = g(lo);
  while (flo >= 0.0) {
    lo *= 2.0;
    if (lo < -1e6) throw NumericalFailure("mu_of_rho: bracket search failed");
    flo = g(lo);
  }
  double fhi = g(0.0);
  if (fhi == 0.0) return 0.0;
  std::uintmax_t iters = 300;
  auto tol = [](double a, double b) {
    return std::fabs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b));
  };
  auto r = boost::math::tools::toms748_solve(g, lo, 0.0, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double w_m1(double x) { return lambert_w_m1(x); }

}  // namespace

void ModelParams::validate() const {
  if (d < 3) throw DomainError("ModelParams: dimension must be >= 3");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("ModelParams: beta must be > 0");
}

double pressure(const ModelParams& p, double mu) {
  p.validate();
  require_mu(mu, "pressure");
  return thermal_prefactor(p) * polylog(0.5 * p.d + 1.0, std::exp(p.beta * mu));
}

double density(const ModelParams& p, double mu) {
  p.validate();
  require_mu(mu, "density");
  return thermal_prefactor(p) * polylog(0.5 * p.d, std::exp(p.beta * mu));
}

double critical_density(const ModelParams& p) {
  p.validate();
  return thermal_prefactor(p) * zeta(0.5 * p.d);
}

double density_prime(const ModelParams& p, double mu) {
  p.validate();
  require_mu(mu, "density_prime");
  if (mu == 0.0 && p.d <= 4) throw DivergenceError("density_prime: diverges at mu = 0 for d = 3, 4");
  return p.beta * thermal_prefactor(p) * polylog(0.5 * p.d - 1.0, std::exp(p.beta * mu));
}

ThermoPoint thermo_point(const ModelParams& p, double mu) {
  ThermoPoint t{mu, pressure(p, mu), density(p, mu), std::nullopt};
  if (mu < 0.0 || p.d >= 5) t.density_prime = density_prime(p, mu);
  return t;
}

double mu_of_rho(const ModelParams& p, double rho) {
  p.validate();
  if (!(rho > 0.0)) throw DomainError("mu_of_rho: requires rho > 0");
  double rc = critical_density(p);
  if (rho >= rc) return 0.0;
  return solve_increasing([&](double m) { return density(p, m) / rho - 1.0; }, -1.0);
}

double rate_I(const ModelParams& p, double mu_ref, double x) {
  p.validate();
  require_mu(mu_ref, "rate_I");
  if (x < 0.0) return kInf;
  double p_ref = pressure(p, mu_ref);
  if (x == 0.0) return p_ref;
  double rc = critical_density(p);
  if (x >= rc) return -x * p.beta * mu_ref - pressure(p, 0.0) + p_ref;
  double m = mu_of_rho(p, x);
  return p.beta * x * (m - mu_ref) - pressure(p, m) + p_ref;
}

double rate_I_prime(const ModelParams& p, double mu_ref, double x) {
  p.validate();
  require_mu(mu_ref, "rate_I_prime");
  if (!(x > 0.0 && x < critical_density(p))) throw DomainError("rate_I_prime: x must lie in (0, rho_c)");
  return p.beta * (mu_of_rho(p, x) - mu_ref);
}

double rate_I_second(const ModelParams& p, double x) {
  p.validate();
  if (!(x > 0.0 && x < critical_density(p))) throw DomainError("rate_I_second: x must lie in (0, rho_c)");
  return p.beta / density_prime(p, mu_of_rho(p, x));
}

double pressure_q(const ModelParams& p, std::int64_t q, double mu) {
  p.validate();
  require_mu(mu, "pressure_q");
  if (q < 1) throw DomainError("pressure_q: q must be >= 1");
  return thermal_prefactor(p) * truncated_series(0.5 * p.d + 1.0, std::exp(p.beta * mu), q);
}

double density_q(const ModelParams& p, std::int64_t q, double mu) {
  p.validate();
  require_mu(mu, "density_q");
  if (q < 1) throw DomainError("density_q: q must be >= 1");
  return thermal_prefactor(p) * truncated_series(0.5 * p.d, std::exp(p.beta * mu), q);
}

double mu_of_rho_q(const ModelParams& p, std::int64_t q, double rho) {
  p.validate();
  if (!(rho > 0.0)) throw DomainError("mu_of_rho_q: requires rho > 0");
  double top = density_q(p, q, 0.0);
  if (rho >= top) throw RangeError("mu_of_rho_q: rho >= truncated density at mu = 0");
  return solve_increasing([&](double m) { return density_q(p, q, m) / rho - 1.0; }, -1.0);
}

double rate_I_q(const ModelParams& p, std::int64_t q, double mu_ref, double x) {
  p.validate();
  require_mu(mu_ref, "rate_I_q");
  if (x < 0.0) return kInf;
  double p_ref = pressure_q(p, q, mu_ref);
  if (x == 0.0) return p_ref;
  double top = density_q(p, q, 0.0);
  if (x > top) throw RangeError("rate_I_q: x above truncated density at mu = 0");
  double m = (x == top) ? 0.0 : mu_of_rho_q(p, q, x);
  return p.beta * x * (m - mu_ref) - pressure_q(p, q, m) + p_ref;
}

double a_scale(const ModelParams& p, double volume) {
  p.validate();
  if (!(volume > 0.0)) throw DomainError("a_scale: volume must be > 0");
  if (p.d == 3) return std::pow(volume, 2.0 / 3.0);
  if (p.d == 4) return std::sqrt(volume * std::max(std::log(volume), 1.0));
  return std::sqrt(volume);
}

AsymptoticComparison asymptotics_validator(const ModelParams& p, AsymptoticKind kind, double h) {
  p.validate();
  if (!(h > 0.0)) throw DomainError("asymptotics_validator: h must be > 0");
  const double b = p.beta;
  const double pi = std::numbers::pi;
  const double c4 = c_d(4);
  const double rc = critical_density(p);
  double exact = 0.0, stated = 0.0, corrected = 0.0;

  switch (kind) {
    case AsymptoticKind::density_near_0:
      exact = rc - density(p, -h);
      if (p.d >= 5) {
        stated = corrected = h * density_prime(p, 0.0);
      } else if (p.d == 4) {
        stated = c4 * h / b * std::log(1.0 / h);
        corrected = c4 * h / b * std::log(1.0 / (b * h));
      } else {
        stated = std::sqrt(2.0 * h) / (pi * b);
        corrected = std::sqrt(0.5 * h) / (pi * b);
      }
      break;
    case AsymptoticKind::mu_near_rc:
      if (!(h < rc)) throw DomainError("asymptotics_validator: h must be < rho_c");
      exact = mu_of_rho(p, rc - h);
      if (p.d >= 5) {
        stated = corrected = -h / density_prime(p, 0.0);
      } else if (p.d == 4) {
        stated = -h * b / (c4 * w_m1(-h * b / c4));
        corrected = h * b / (c4 * w_m1(-h * b * b / c4));
      } else {
        stated = corrected = -2.0 * b * b * pi * pi * h * h;
      }
      break;
    case AsymptoticKind::rate_near_rc:
      if (!(h < rc)) throw DomainError("asymptotics_validator: h must be < rho_c");
      exact = rate_I(p, 0.0, rc - h);
      if (p.d >= 5) {
        stated = corrected = h * h * b / (2.0 * density_prime(p, 0.0));
      } else if (p.d == 4) {
        stated = -2.0 * h * h * b * b / (c4 * w_m1(-h * b / c4));
        corrected = -h * h * b * b / (2.0 * c4 * w_m1(-h * b * b / c4));
      } else {
        stated = 4.0 * h * h * h * b * b * b * pi * pi;
        corrected = (2.0 / 3.0) * pi * pi * b * b * b * h * h * h;
      }
      break;
  }
  return {exact, stated, exact / stated, corrected, exact / corrected};
}

}  // namespace loopsoup
