// Independent reference computations used only by the tests. Nothing here
// calls into the library's special functions.
#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

namespace oracle {

using real = long double;

// Euler–Maclaurin for Σ_{k≥1} f(k) with f(k) = z^k k^{-s}: direct sum below n,
// tail integral by exp-sinh quadrature, endpoint corrections up to f'''.
inline real polylog(real s, real z, int n = 2000) {
  const real L = std::log(z);  // ≤ 0
  real head = 0;
  for (int k = n - 1; k >= 1; --k) head += std::exp(k * L - s * std::log(static_cast<real>(k)));
  auto f = [&](real k) { return std::exp(k * L - s * std::log(k)); };
  boost::math::quadrature::exp_sinh<real> q;
  real tail = q.integrate([&](real t) { return f(static_cast<real>(n) + t); });
  const real N = n, fn = f(N);
  const real g1 = L - s / N, g2 = s / (N * N), g3 = -2 * s / (N * N * N);
  const real d1 = fn * g1;
  const real d3 = fn * (g1 * g1 * g1 + 3 * g1 * g2 + g3);
  return head + tail + fn / 2 - d1 / 12 + d3 / 720;
}

inline real zeta(real s, int n = 2000) { return polylog(s, 1.0L, n); }

// Lower branch of y e^y = x on [−1/e, 0) by plain bisection.
inline double lambert_w_m1(double x) {
  double lo = -2.0, hi = -1.0;
  while (lo * std::exp(lo) < x) lo *= 2;  // y e^y increases towards 0 from below on (−∞, −1]
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) > x) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline real cd(int d) { return std::pow(2 * static_cast<real>(M_PI), -static_cast<real>(d) / 2); }

inline real pressure(int d, real beta, real mu) {
  return cd(d) * std::pow(beta, -static_cast<real>(d) / 2) * polylog(static_cast<real>(d) / 2 + 1, std::exp(beta * mu));
}
inline real density(int d, real beta, real mu) {
  return std::pow(2 * static_cast<real>(M_PI) * beta, -static_cast<real>(d) / 2) *
         polylog(static_cast<real>(d) / 2, std::exp(beta * mu));
}

// Golden-section maximisation of a unimodal function on [a, b].
inline real golden_max(const std::function<real(real)>& f, real a, real b, int iters = 200) {
  const real r = (std::sqrt(5.0L) - 1) / 2;
  real c = b - r * (b - a), d = a + r * (b - a);
  real fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  return std::max(fc, fd);
}

// I_μ(x) = sup_t {xt − P(μ + t/β) + P(μ)}, written in ν = μ + t/β ≤ 0 and maximised by golden section.
inline real rate_legendre(int d, real beta, real mu, real x) {
  auto obj = [&](real nu) { return beta * (nu - mu) * x - pressure(d, beta, nu) + pressure(d, beta, mu); };
  real v = golden_max(obj, -40.0L / beta, 0.0L);
  return std::max(v, obj(0.0L));
}

// Integer partitions of n as (length -> multiplicity) maps.
inline std::vector<std::map<std::int64_t, std::int64_t>> partitions(std::int64_t n, std::int64_t min_part = 1) {
  std::vector<std::map<std::int64_t, std::int64_t>> out;
  std::vector<std::int64_t> cur;
  std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t rest, std::int64_t cap) {
    if (rest == 0) {
      std::map<std::int64_t, std::int64_t> c;
      for (auto p : cur) ++c[p];
      out.push_back(c);
      return;
    }
    for (std::int64_t p = std::min(rest, cap); p >= min_part; --p) {
      cur.push_back(p);
      rec(rest - p, p);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

// λ_j = V c_d (βj)^{-d/2} e^{βμj} / j
inline real intensity(real V, int d, real beta, real mu, std::int64_t j) {
  real jj = static_cast<real>(j);
  return V * cd(d) * std::pow(beta * jj, -static_cast<real>(d) / 2) * std::exp(beta * mu * jj) / jj;
}

// log P(N = n) for the free Poisson cycle-count model by summing over partitions.
inline real free_log_pmf(real V, int d, real beta, real mu, std::int64_t n) {
  real total = V * pressure(d, beta, mu);
  real acc = 0;
  for (const auto& part : partitions(n)) {
    real lw = 0;
    for (auto [j, k] : part) lw += k * std::log(intensity(V, d, beta, mu, j)) - std::lgamma(static_cast<real>(k) + 1);
    acc += std::exp(lw);
  }
  if (n == 0) acc = 1;
  return std::log(acc) - total;
}

}  // namespace oracle
