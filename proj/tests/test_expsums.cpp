#include <doctest.h>

#include <random>

#include "cubeval/errors.hpp"
#include "cubeval/expsums.hpp"
#include "cubeval/localdata.hpp"

using namespace cubeval;
using namespace cubeval::expsum;

namespace {

const BinaryCubicForm kF{1, 0, 0, 2};

std::complex<double> closed(ExpSumSpec s) { return exp_sum_closed(kF, s).value; }

}  // namespace

TEST_CASE("unrestricted examples") {
  CHECK(std::abs(closed({5, 1, 2, 0, 0}) - 5.0) < 1e-12);
  CHECK(std::abs(closed({5, 1, 2, 1, -2}) - 5.0) < 1e-12);
  CHECK(std::abs(closed({5, 1, 2, 1, 0})) < 1e-12);
  CHECK(std::abs(exp_sum_bruteforce({5, 1, 2, 1, 0})) < 1e-12);
}

TEST_CASE("restricted examples") {
  ExpSumSpec s{5, 1, 2, 1, -2};
  s.restricted = true;
  const auto full = exp_sum_closed(kF, s);
  CHECK(std::abs(full.value - 4.0) < 1e-12);
  CHECK(full.branch == Branch::kFull);

  ExpSumSpec s2{5, 2, 22, 1, -22};
  s2.restricted = true;
  CHECK(std::abs(closed(s2) - 20.0) < 1e-12);
  CHECK(std::abs(exp_sum_bruteforce(s2) - 20.0) < 1e-9);

  ExpSumSpec s3{5, 1, 2, 1, 1};
  s3.restricted = true;
  CHECK(std::abs(closed(s3) - exp_sum_bruteforce(s3)) < 1e-9);
}

TEST_CASE("closed form matches direct summation with progressions and reduction") {
  std::mt19937_64 rng(11);
  const BinaryCubicForm forms[] = {kF, {1, 0, 0, 5}, {1, -1, -2, 1}};
  int checked = 0;
  for (const auto& f : forms) {
    for (uint64_t p : {5, 7, 11, 13, 31}) {
      if (local::is_singular(f, p)) continue;
      for (unsigned k = 1; k <= 3; ++k) {
        const auto roots = local::lift_roots(f, p, k);
        if (roots.modulus > 2000) continue;
        for (const auto& root : roots.affine_roots) {
          for (int trial = 0; trial < 12; ++trial) {
            const auto pk = static_cast<int64_t>(roots.modulus);
            ExpSumSpec s{p, k, root.value, static_cast<int64_t>(rng() % (3 * pk)) - pk,
                         static_cast<int64_t>(rng() % (3 * pk)) - pk};
            if (trial % 3 == 0) s.g1 = s.g1 / static_cast<int64_t>(p) * static_cast<int64_t>(p);
            if (trial % 4 == 1) s.g2 = -(s.g1 * static_cast<int64_t>(root.value)) % pk;
            s.a1 = static_cast<int64_t>(rng() % 20);
            s.a2 = static_cast<int64_t>(rng() % 20);
            do s.q = 1 + rng() % 12; while (s.q % p == 0);
            s.restricted = trial % 2 == 0;
            REQUIRE(std::abs(exp_sum_closed(f, s).value - exp_sum_bruteforce(s)) < 1e-9);
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("progression sums are multiplicative across coprime moduli") {
  const auto r31 = local::roots_mod_p(kF, 31);
  const uint64_t w5 = 2, w31 = r31.affine_roots[0].value;
  // CRT lift of the two roots modulo 155.
  uint64_t w = 0;
  for (uint64_t t = 0; t < 155; ++t) {
    if (t % 5 == w5 && t % 31 == w31) w = t;
  }
  for (int64_t g1 : {0, 1, 7, 31}) {
    for (int64_t g2 : {0, 3, -5}) {
      const auto whole = progression_sum(155, w, g1, g2);
      // g / 155 = g u / 5 + g v / 31 with 31 u + 5 v = 1: u = 1, v = -6.
      const auto a = progression_sum(5, w5, g1 * 1, g2 * 1);
      const auto b = progression_sum(31, w31, g1 * -6, g2 * -6);
      CHECK(std::abs(whole - a * b) < 1e-9);
    }
  }
}

TEST_CASE("invalid specifications") {
  CHECK_THROWS_AS(validate(kF, {5, 1, 3, 0, 0}), InvalidInput);
  ExpSumSpec bad_q{5, 1, 2, 0, 0};
  bad_q.q = 10;
  CHECK_THROWS_AS(validate(kF, bad_q), InvalidInput);
  CHECK_THROWS_AS(exp_sum_closed(kF, {3, 1, 1, 0, 0}), Unsupported);
}
