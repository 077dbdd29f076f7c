#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cubeval/dickman.hpp"
#include "cubeval/errors.hpp"

using namespace cubeval;
using namespace cubeval::dickman;

TEST_CASE("rho values") {
  const auto t = build_rho(10, 1.0 / 64);
  CHECK(rho(t, 1) == 1.0);
  CHECK(rho(t, 0.5) == 1.0);
  CHECK(rho(t, -1) == 0.0);
  CHECK(std::abs(rho(t, 2) - (1 - std::log(2.0))) < 1e-9);
  CHECK(std::abs(rho(t, 3) - 0.04860839) < 1e-8);
  // rho(4), rho(5) tabulated values
  CHECK(std::abs(rho(t, 4) - 0.004910925648) < 1e-11);
  CHECK(std::abs(rho(t, 5) - 0.0003547247003) < 1e-12);
}

TEST_CASE("rho grid invariants") {
  const auto t = build_rho(12, 1.0 / 64);
  const auto& v = t.values();
  for (std::size_t i = 0; i <= 64; ++i) CHECK(v[i] == 1.0);
  for (std::size_t i = 65; i < v.size(); ++i) {
    REQUIRE(v[i] > 0);
    REQUIRE(v[i] < v[i - 1]);
  }
  CHECK(delay_residual(t) < 1e-9);
}

TEST_CASE("halving the step changes rho by less than 1e-9") {
  const auto coarse = build_rho(10, 1.0 / 64);
  const auto fine = build_rho(10, 1.0 / 128);
  for (double u = 0; u <= 10; u += 0.125) {
    CHECK(std::abs(rho(coarse, u) - rho(fine, u)) < 1e-9);
  }
}

TEST_CASE("invalid tables") {
  CHECK_THROWS_AS(build_rho(5, 1.0 / 32), InvalidInput);
  CHECK_THROWS_AS(build_rho(5, 0.015), InvalidInput);
  CHECK_THROWS_AS(build_rho(25, 1.0 / 64), InvalidInput);
  CHECK_THROWS_AS(build_rho(0, 1.0 / 64), InvalidInput);
}

TEST_CASE("reciprocal gamma") {
  CHECK(recip_gamma(1) == doctest::Approx(1.0));
  CHECK(recip_gamma(-1) == 0.0);
  CHECK(recip_gamma(0) == 0.0);
  CHECK(std::abs(recip_gamma(0.5) - 0.5641895835) < 1e-10);
  for (double z : {0.25, 0.5, 1.5, 2.5}) {
    CHECK(std::abs(recip_gamma(z + 1) - recip_gamma(z) / z) < 1e-10);
  }
}

TEST_CASE("zeta_q(2)") {
  const double z2 = std::numbers::pi * std::numbers::pi / 6;
  CHECK(std::abs(zeta_q_2(1) - z2) < 1e-15);
  CHECK(std::abs(zeta_q_2(2) - z2 * 0.75) < 1e-15);
  CHECK(std::abs(zeta_q_2(6) - z2 * 0.75 * 8 / 9) < 1e-15);
  CHECK(std::abs(zeta_q_2(12) - zeta_q_2(6)) < 1e-15);
}
