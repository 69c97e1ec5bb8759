#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/full_hyl.hpp"

using namespace loopsoup;

namespace {

// Direct evaluation of the full rate function, term by term.
double rate_oracle(const ModelParams& p, const HYLParams& h, double mu, const std::vector<double>& x, double pt) {
  long double D = 0, s = 0, sq = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double j = i + 1;
    long double pj = oracle::cd(p.d) * std::pow(p.beta * j, -p.d / 2.0L);
    D += j * x[i];
    sq += j * j * x[i] * x[i];
    if (x[i] > 0) s += x[i] * (std::log(j * x[i] / pj) - 1);
  }
  long double e = std::max<long double>(mu - h.a * D, 0);
  long double v = s - mu * p.beta * D + 0.5L * h.a * p.beta * D * D - 0.5L * h.b * p.beta * sq -
                  p.beta / (2 * (h.a - h.b)) * e * e - oracle::pressure(p.d, p.beta, 0) + pt;
  return static_cast<double>(v);
}

std::vector<double> random_x(std::mt19937_64& rng, std::size_t J) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(J);
  for (std::size_t j = 0; j < J; ++j) x[j] = 0.05 * u(rng) / ((j + 1) * (j + 1));
  return x;
}

}  // namespace

TEST_SUITE("full_hyl") {
  TEST_CASE("rate matches the direct formula") {
    std::mt19937_64 rng(7);
    ModelParams p{3, 1.3};
    for (double mu : {-0.5, 0.0, 0.4}) {
      for (int r = 0; r < 5; ++r) {
        auto x = random_x(rng, 60);
        if (r == 0) x[3] = 0.0;
        double v = full_rate(p, {2.0, 1.0}, mu, {x}, 0.25);
        CHECK(std::fabs(v - rate_oracle(p, {2.0, 1.0}, mu, x, 0.25)) <= 1e-12 * std::max(1.0, std::fabs(v)));
      }
    }
  }

  TEST_CASE("gradient against central differences") {
    std::mt19937_64 rng(11);
    ModelParams p{3, 1.0};
    HYLParams h{2.0, 1.0};
    for (double mu : {-0.3, 0.5}) {
      auto x = random_x(rng, 40);
      auto g = full_rate_gradient(p, h, mu, {x});
      for (std::size_t j : {0u, 1u, 7u, 39u}) {
        double e = 1e-6 * x[j];
        auto xp = x, xm = x;
        xp[j] += e;
        xm[j] -= e;
        double fd = (full_rate(p, h, mu, {xp}, 0) - full_rate(p, h, mu, {xm}, 0)) / (2 * e);
        INFO("mu=" << mu << " j=" << j + 1);
        CHECK(std::fabs(g[j] - fd) <= 1e-5 * std::max(1.0, std::fabs(fd)));
      }
    }
  }

  TEST_CASE("calibrated rate is non-negative and vanishes at the minimiser") {
    ModelParams p{3, 1.0};
    HYLParams h{2.0, 1.0};
    for (double mu : {-0.5, 0.3}) {
      auto m = minimize_full_rate(p, h, mu, 200);
      double pt = calibrated_p_tilde(p, h, mu, 200);
      CHECK(std::fabs(pt + m.value) <= 1e-10);
      CHECK(std::fabs(full_rate(p, h, mu, m.x_star, pt)) <= 1e-10);
      CHECK(m.grad_norm <= 1e-6);
      std::mt19937_64 rng(3);
      for (int r = 0; r < 20; ++r) CHECK(full_rate(p, h, mu, {random_x(rng, 200)}, pt) >= -1e-10);
      // stationarity seen from outside: small perturbations do not decrease the value
      for (std::size_t j : {0u, 4u, 20u}) {
        auto xp = m.x_star.x;
        xp[j] *= 1.01;
        CHECK(full_rate(p, h, mu, {xp}, pt) >= -1e-12);
      }
    }
  }

  TEST_CASE("coercive along rays") {
    ModelParams p{3, 1.0};
    HYLParams h{2.0, 1.0};
    std::mt19937_64 rng(5);
    auto x = random_x(rng, 80);
    double prev = full_rate(p, h, 0.2, {x}, 0);
    for (double t : {10.0, 100.0, 1000.0}) {
      auto y = x;
      for (auto& v : y) v *= t;
      double cur = full_rate(p, h, 0.2, {y}, 0);
      CHECK(cur > prev);
      prev = cur;
    }
  }

  TEST_CASE("pressure gap witness") {
    ModelParams p{3, 1.0};
    HYLParams h{2.0, 1.0};
    auto g = pressure_gap(p, h, 0.0);
    CHECK(g.gap < 0.0);
    CHECK(g.gap >= g.lower_bound - 1e-12);
    CHECK(g.lower_bound == doctest::Approx(-0.5 * h.b * g.x1_star * g.x1_star));
    CHECK(g.min_with_addon > g.min_rate);
    auto g2 = pressure_gap(p, h, 0.0, 2 * g.jmax_used, false);
    CHECK(std::fabs(g2.gap - g.gap) <= 1e-8);
  }

  TEST_CASE("input validation") {
    ModelParams p{3, 1.0};
    CHECK_THROWS_AS(full_rate(p, {1.0, 1.0}, 0.0, {{0.1}}, 0.0), DomainError);
    CHECK_THROWS_AS(full_rate(p, {2.0, 1.0}, 0.0, {{-0.1}}, 0.0), DomainError);
    CHECK_THROWS_AS(minimize_full_rate(p, {2.0, 1.0}, 0.0, 10), DomainError);
  }
}
