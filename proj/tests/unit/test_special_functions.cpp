#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/special_functions.hpp"

using namespace loopsoup;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }
}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("zeta at even integers and against Euler-Maclaurin") {
    CHECK(std::fabs(zeta(2.0) - M_PI * M_PI / 6) <= 1e-12);
    CHECK(rel(zeta(4.0), std::pow(M_PI, 4) / 90) <= 1e-13);
    for (double s : {1.5, 2.5, 3.0, 5.5}) CHECK(rel(zeta(s), static_cast<double>(oracle::zeta(s))) <= 1e-12);
    CHECK_THROWS_AS(zeta(1.0), DomainError);
  }

  TEST_CASE("polylog near z = 1 matches the Euler-Maclaurin oracle") {
    for (double s : {1.5, 2.0, 2.5}) {
      for (double z : {0.6, 0.9, 0.99, 0.999, 0.99999, 1.0}) {
        INFO("s=" << s << " z=" << z);
        CHECK(rel(polylog(s, z), static_cast<double>(oracle::polylog(s, z))) <= 1e-10);
      }
    }
  }

  TEST_CASE("polylog away from 1 and on both sides of the series switch") {
    for (double s : {0.5, 1.5, 3.5}) {
      for (double z : {1e-8, 0.1, 0.3, 0.4999999, 0.5, 0.5000001, 0.7}) {
        INFO("s=" << s << " z=" << z);
        CHECK(rel(polylog(s, z), static_cast<double>(oracle::polylog(s, z))) <= 1e-12);
      }
    }
    CHECK(polylog(2.0, 0.0) == 0.0);
  }

  TEST_CASE("polylog closed forms") {
    for (double z : {0.2, 0.5, 0.9, 0.999}) CHECK(rel(polylog(1.0, z), -std::log1p(-z)) <= 1e-13);
    CHECK(rel(polylog(2.0, 0.5), M_PI * M_PI / 12 - 0.5 * std::log(2.0) * std::log(2.0)) <= 1e-13);
    CHECK(rel(polylog(2.0, 1.0), M_PI * M_PI / 6) <= 1e-13);
    CHECK(rel(polylog(3.0, 1.0), zeta(3.0)) <= 1e-13);
  }

  TEST_CASE("polylog is increasing in z and decreasing in s") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      double s = 0.6 + 3 * U(rng), z1 = U(rng), z2 = U(rng);
      if (z1 > z2) std::swap(z1, z2);
      CHECK(polylog(s, z1) <= polylog(s, z2));
      CHECK(polylog(s + 0.5, z2) <= polylog(s, z2));
    }
  }

  TEST_CASE("polylog domain errors") {
    CHECK_THROWS_AS(polylog(1.5, 1.1), DomainError);
    CHECK_THROWS_AS(polylog(1.5, -0.1), DomainError);
    CHECK_THROWS_AS(polylog(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(polylog(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(polylog(0.5, 1.0), DomainError);
    PrecisionPolicy bad;
    bad.rel_tol = 0.1;
    CHECK_THROWS_AS(polylog(2.0, 0.3, bad), DomainError);
  }

  TEST_CASE("Lambert W_-1 residuals and bisection oracle across the bracket") {
    const double e1 = -std::exp(-1.0);
    CHECK(lambert_w_m1(e1) == doctest::Approx(-1.0).epsilon(1e-7));
    for (double t = 1e-12; t < 1.0; t *= 1.7) {
      double x = e1 * (1.0 - t);
      double w = lambert_w_m1(x);
      INFO("x=" << x);
      CHECK(w <= -1.0);
      CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * std::fabs(x));
    }
    for (double x = -1e-300; x > e1; x *= 3.0) {
      double w = lambert_w_m1(x);
      CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * std::fabs(x));
      CHECK(rel(w, oracle::lambert_w_m1(x)) <= 1e-12);
    }
    CHECK_THROWS_AS(lambert_w_m1(0.0), DomainError);
    CHECK_THROWS_AS(lambert_w_m1(-0.5), DomainError);
  }

  TEST_CASE("bridge return weight") {
    CHECK(rel(bridge_return_weight(3, 1.0, 1), std::pow(2 * M_PI, -1.5)) <= 1e-15);
    CHECK(rel(bridge_return_weight(4, 2.0, 3), c_d(4) * std::pow(6.0, -2.0)) <= 1e-15);
    CHECK_THROWS_AS(bridge_return_weight(2, 1.0, 1), DomainError);
    CHECK_THROWS_AS(bridge_return_weight(3, 1.0, 0), DomainError);
  }
}
