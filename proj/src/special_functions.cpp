#include "loopsoup/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

// Below this z the plain series is cheap; above it the log-expansion converges
// geometrically with ratio |log z| / 2π.
constexpr double kSeriesCut = 0.5;
constexpr int kMaxExpansionTerms = 120;

bool is_integer(double s) { return s == std::floor(s); }

double direct_series(double s, double z, const PrecisionPolicy& policy) {
  double sum = 0.0;
  double zj = 1.0;
  for (std::int64_t j = 1; j <= policy.max_terms; ++j) {
    zj *= z;
    double jd = static_cast<double>(j);
    sum += zj * std::exp(-s * std::log(jd));
    // Remaining terms are bounded by a geometric series.
    double tail = zj * z * std::exp(-s * std::log(jd + 1.0)) / (1.0 - z);
    if (tail <= 0.1 * policy.rel_tol * sum) return sum;
  }
  throw NumericalFailure("polylog: series did not converge within max_terms");
}

// ζ(s−k)/k! for k = 0, 1, ...; cached per order since the thermodynamic code
// evaluates a handful of orders millions of times.
const std::vector<double>& expansion_coefficients(double s) {
  thread_local std::unordered_map<double, std::vector<double>> cache;
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  std::vector<double> c(kMaxExpansionTerms, 0.0);
  double fact = 1.0;
  for (int k = 0; k < kMaxExpansionTerms; ++k) {
    if (k > 0) fact *= k;
    double arg = s - k;
    c[k] = (arg == 1.0) ? 0.0 : boost::math::zeta(arg) / fact;
  }
  return cache.emplace(s, std::move(c)).first->second;
}

double near_one(double s, double delta, const PrecisionPolicy& policy) {
  const auto& c = expansion_coefficients(s);
  double sum;
  int skip = -1;
  if (is_integer(s)) {
    int n = static_cast<int>(s);
    double harmonic = 0.0;
    for (int k = 1; k < n; ++k) harmonic += 1.0 / k;
    sum = std::pow(delta, n - 1) / std::tgamma(static_cast<double>(n)) *
          (harmonic - std::log(-delta));
    skip = n - 1;
  } else {
    sum = std::tgamma(1.0 - s) * std::pow(-delta, s - 1.0);
  }
  double dk = 1.0;
  int quiet = 0;
  for (int k = 0; k < kMaxExpansionTerms; ++k) {
    if (k > 0) dk *= delta;
    if (k == skip) continue;
    double term = c[k] * dk;
    sum += term;
    if (std::fabs(term) <= 0.01 * policy.rel_tol * std::fabs(sum)) {
      if (++quiet >= 2 && k > skip) return sum;
    } else {
      quiet = 0;
    }
  }
  throw NumericalFailure("polylog: expansion near z=1 did not converge");
}

}  // namespace

void PrecisionPolicy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-6))
    throw DomainError("PrecisionPolicy: rel_tol must lie in (0, 1e-6]");
  if (max_terms < 1000) throw DomainError("PrecisionPolicy: max_terms must be >= 1000");
}

double polylog(double s, double z, const PrecisionPolicy& policy) {
  policy.validate();
  if (!(s > 0.0)) throw DomainError("polylog: order must be > 0");
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("polylog: z must lie in [0, 1]");
  if (z == 1.0) {
    if (s <= 1.0) throw DomainError("polylog: diverges at z = 1 for s <= 1");
    return zeta(s);
  }
  if (z == 0.0) return 0.0;
  if (s == 1.0) return -std::log1p(-z);
  if (z <= kSeriesCut) return direct_series(s, z, policy);
  return near_one(s, std::log(z), policy);
}

double zeta(double s) {
  if (!(s > 1.0)) throw DomainError("zeta: requires s > 1");
  return boost::math::zeta(s);
}

double lambert_w_m1(double x, const PrecisionPolicy& policy) {
  policy.validate();
  const double branch = -std::exp(-1.0);
  if (!(x >= branch && x < 0.0)) throw DomainError("lambert_w_m1: x must lie in [-1/e, 0)");
  if (x == branch) return -1.0;

  auto f = [x](double y) { return y * std::exp(y) - x; };
  double y = boost::math::lambert_wm1(x);
  if (std::fabs(f(y)) <= policy.rel_tol * std::fabs(x)) return y;

  // y·e^y decreases on (−∞, −1], so f(lo) > 0 > f(hi) brackets the root.
  double hi = -1.0;
  double lo = std::min(y, -1.0) - 1.0;
  while (f(lo) <= 0.0) lo *= 2.0;
  for (int it = 0; it < 400; ++it) {
    double fy = f(y);
    if (std::fabs(fy) <= policy.rel_tol * std::fabs(x)) return y;
    if (fy > 0.0) lo = y; else hi = y;
    double step = fy / ((1.0 + y) * std::exp(y));
    double next = y - step;
    y = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return y;
}

double c_d(int d) { return std::pow(2.0 * std::numbers::pi, -0.5 * d); }

double bridge_return_weight(int d, double beta, std::int64_t j) {
  if (d < 3) throw DomainError("bridge_return_weight: d must be >= 3");
  if (!(beta > 0.0)) throw DomainError("bridge_return_weight: beta must be > 0");
  if (j < 1) throw DomainError("bridge_return_weight: j must be >= 1");
  return c_d(d) * std::pow(beta * static_cast<double>(j), -0.5 * d);
}

}  // namespace loopsoup
