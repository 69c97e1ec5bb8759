#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/thermo.hpp"

using namespace loopsoup;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }
}  // namespace

TEST_SUITE("thermo") {
  TEST_CASE("free-gas functions against the oracle series") {
    for (int d : {3, 4, 5}) {
      for (double beta : {0.5, 1.0, 2.0}) {
        ModelParams p{d, beta};
        for (double mu : {-2.0, -0.3, -1e-3, 0.0}) {
          INFO("d=" << d << " beta=" << beta << " mu=" << mu);
          CHECK(rel(pressure(p, mu), static_cast<double>(oracle::pressure(d, beta, mu))) <= 1e-10);
          CHECK(rel(density(p, mu), static_cast<double>(oracle::density(d, beta, mu))) <= 1e-10);
        }
      }
    }
    ModelParams p3{3, 1.0};
    CHECK(rel(critical_density(p3), std::pow(2 * M_PI, -1.5) * zeta(1.5)) <= 1e-14);
  }

  TEST_CASE("density is the mu-derivative of pressure; density_prime its derivative") {
    ModelParams p{3, 1.3};
    for (double mu : {-2.0, -0.5, -0.05}) {
      double h = 1e-5;
      // dP/dμ = βρ in these units
      double fd = (pressure(p, mu + h) - pressure(p, mu - h)) / (2 * h * p.beta);
      CHECK(rel(density(p, mu), fd) <= 1e-8);
      double fd2 = (density(p, mu + h) - density(p, mu - h)) / (2 * h);
      CHECK(rel(density_prime(p, mu), fd2) <= 1e-6);
    }
    CHECK_THROWS_AS(density_prime(p, 0.0), DivergenceError);
    ModelParams p5{5, 1.0};
    CHECK(std::isfinite(density_prime(p5, 0.0)));
    auto tp = thermo_point(p, 0.0);
    CHECK_FALSE(tp.density_prime.has_value());
  }

  TEST_CASE("mu_of_rho inverts density and saturates at rho_c") {
    ModelParams p{3, 1.0};
    double rc = critical_density(p);
    for (double f : {0.01, 0.2, 0.5, 0.9, 0.999}) CHECK(rel(density(p, mu_of_rho(p, f * rc)), f * rc) <= 1e-10);
    CHECK(mu_of_rho(p, rc) == 0.0);
    CHECK(mu_of_rho(p, 3 * rc) == 0.0);
    CHECK_THROWS_AS(mu_of_rho(p, 0.0), DomainError);
    CHECK_THROWS_AS(pressure(p, 0.1), DomainError);
  }

  TEST_CASE("rate function matches the Legendre transform at 20 points") {
    for (auto [d, beta, mu] : {std::tuple{3, 1.0, 0.0}, std::tuple{3, 1.0, -0.3}, std::tuple{4, 0.7, -0.1},
                               std::tuple{5, 1.5, 0.0}}) {
      ModelParams p{d, beta};
      double rc = critical_density(p);
      for (int i = 1; i <= 20; ++i) {
        double x = 1.3 * rc * i / 20.0;
        INFO("d=" << d << " mu=" << mu << " x=" << x);
        CHECK(std::fabs(rate_I(p, mu, x) - static_cast<double>(oracle::rate_legendre(d, beta, mu, x))) <= 1e-8);
      }
    }
  }

  TEST_CASE("rate function zeros, sign and shape") {
    ModelParams p{3, 1.0};
    double rc = critical_density(p);
    CHECK(std::fabs(rate_I(p, 0.0, rc)) <= 1e-15);
    for (double f : {1.0, 1.5, 10.0}) CHECK(rate_I(p, 0.0, f * rc) == 0.0);
    CHECK(std::fabs(rate_I(p, -0.3, density(p, -0.3))) <= 1e-13);
    CHECK(std::isinf(rate_I(p, 0.0, -1.0)));
    CHECK(rel(rate_I(p, -0.3, 0.0), pressure(p, -0.3)) <= 1e-14);
    double prev = rate_I(p, 0.0, 0.01 * rc);
    for (int i = 2; i <= 100; ++i) {
      double x = 0.01 * rc * i;
      double v = rate_I(p, 0.0, x);
      CHECK(v >= 0.0);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }

  TEST_CASE("rate derivatives against finite differences") {
    for (int d : {3, 4, 5}) {
      ModelParams p{d, 1.0};
      double rc = critical_density(p);
      for (double f : {0.1, 0.5, 0.9}) {
        double x = f * rc, h = 1e-6 * rc;
        double fd = (rate_I(p, -0.2, x + h) - rate_I(p, -0.2, x - h)) / (2 * h);
        INFO("d=" << d << " x=" << x);
        CHECK(rel(rate_I_prime(p, -0.2, x), fd) <= 1e-6);
        double fd2 = (rate_I_prime(p, 0.0, x + h) - rate_I_prime(p, 0.0, x - h)) / (2 * h);
        CHECK(rel(rate_I_second(p, x), fd2) <= 1e-5);
      }
      for (int i = 1; i <= 100; ++i) CHECK(rate_I_second(p, rc * (0.01 + 0.98 * i / 100.0)) > 0.0);
    }
  }

  TEST_CASE("truncated variants") {
    ModelParams p{3, 1.0};
    // q = 1 keeps one term of each series
    CHECK(rel(pressure_q(p, 1, -0.5), c_d(3) * std::exp(-0.5)) <= 1e-14);
    for (std::int64_t q : {10, 100, 1000}) {
      CHECK(pressure_q(p, q, 0.0) < pressure(p, 0.0));
      CHECK(density_q(p, q, -0.2) <= density(p, -0.2));
    }
    CHECK(density_q(p, 10, -0.2) < density(p, -0.2));
    CHECK(rel(pressure_q(p, 100000, -0.5), pressure(p, -0.5)) <= 1e-12);
    double top = density_q(p, 50, 0.0);
    CHECK(rel(density_q(p, 50, mu_of_rho_q(p, 50, 0.5 * top)), 0.5 * top) <= 1e-10);
    CHECK_THROWS_AS(mu_of_rho_q(p, 50, top), RangeError);
    CHECK_THROWS_AS(rate_I_q(p, 50, 0.0, 1.01 * top), RangeError);
    CHECK(rate_I_q(p, 50, 0.0, top) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("a_scale regimes") {
    CHECK(rel(a_scale({3, 1.0}, 1000.0), 100.0) <= 1e-12);
    CHECK(rel(a_scale({4, 1.0}, 1000.0), std::sqrt(1000.0 * std::log(1000.0))) <= 1e-12);
    CHECK(rel(a_scale({6, 1.0}, 400.0), 20.0) <= 1e-12);
  }

  TEST_CASE("asymptotic comparisons") {
    ModelParams p3{3, 1.0};
    auto c = asymptotics_validator(p3, AsymptoticKind::rate_near_rc, 1e-4);
    CHECK(std::fabs(c.corrected_ratio - 1.0) < 1e-3);
    CHECK(c.ratio == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
    auto m = asymptotics_validator(p3, AsymptoticKind::mu_near_rc, 1e-4);
    CHECK(std::fabs(m.ratio - 1.0) < 1e-2);
    auto dn = asymptotics_validator(p3, AsymptoticKind::density_near_0, 1e-8);
    CHECK(std::fabs(dn.corrected_ratio - 1.0) < 1e-3);
    ModelParams p5{5, 1.0};
    double prev = 1e9;
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
      double dev = std::fabs(asymptotics_validator(p5, AsymptoticKind::rate_near_rc, h).ratio - 1.0);
      CHECK(dev < prev);
      prev = dev;
    }
    ModelParams p4{4, 1.0};
    auto r4 = asymptotics_validator(p4, AsymptoticKind::mu_near_rc, 1e-6);
    CHECK(r4.corrected_ratio > 0.8);
    CHECK(r4.corrected_asymptotic < 0.0);
    CHECK_THROWS_AS(asymptotics_validator(p3, AsymptoticKind::rate_near_rc, 1.0), DomainError);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelParams({2, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({3, 0.0}).validate(), DomainError);
  }
}
