#include <doctest.h>

#include <algorithm>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"

using namespace cubeval;
using namespace cubeval::local;

namespace {

const BinaryCubicForm kF{1, 0, 0, 2};

u128 gamma_bruteforce(const BinaryCubicForm& f, uint64_t d) {
  u128 count = 0;
  for (uint64_t n1 = 0; n1 < d; ++n1) {
    for (uint64_t n2 = 0; n2 < d; ++n2) {
      i128 v = evaluate(f, static_cast<int64_t>(n1), static_cast<int64_t>(n2));
      if (v % static_cast<i128>(d) == 0) ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("roots modulo p") {
  const auto r5 = roots_mod_p(kF, 5);
  REQUIRE(r5.affine_roots.size() == 1);
  CHECK(r5.affine_roots[0].value == 2);
  CHECK_FALSE(r5.has_infinity_root);
  CHECK(roots_mod_p(kF, 7).count() == 0);
  CHECK(roots_mod_p(kF, 31).affine_roots.size() == 3);
  for (const auto& r : roots_mod_p(kF, 31).affine_roots) {
    CHECK((r.value * r.value * r.value + 2) % 31 == 0);
  }
  CHECK(roots_mod_p({2, 1, 0, 1}, 2).has_infinity_root);
}

TEST_CASE("lifted roots") {
  const auto r = lift_roots(kF, 5, 2);
  REQUIRE(r.affine_roots.size() == 1);
  CHECK(r.affine_roots[0].value == 22);
  CHECK(r.modulus == 25);
  CHECK(lift_roots(kF, 7, 3).affine_roots.empty());
  // 3 | disc: roots of t^3 + 1 mod 9 by exhaustive search
  const auto r9 = lift_roots({1, 0, 0, 1}, 3, 2);
  std::vector<uint64_t> expect;
  for (uint64_t t = 0; t < 9; ++t) {
    if ((t * t * t + 1) % 9 == 0) expect.push_back(t);
  }
  std::vector<uint64_t> got;
  for (const auto& a : r9.affine_roots) got.push_back(a.value);
  CHECK(got == expect);
}

TEST_CASE("lifted roots satisfy the congruence and are distinct") {
  for (const BinaryCubicForm f : {kF, BinaryCubicForm(1, -1, -2, 1), BinaryCubicForm(3, 1, -4, 2)}) {
    for (uint64_t p : {2, 3, 5, 7, 13, 31, 43}) {
      for (unsigned k = 1; k <= 4; ++k) {
        const auto r = lift_roots(f, p, k);
        std::vector<uint64_t> values;
        for (const auto& a : r.affine_roots) {
          const i128 m = static_cast<i128>(r.modulus);
          i128 t = static_cast<i128>(a.value);
          i128 val = ((f.a() * t % m * t % m * t) + (f.b() * t % m * t) + f.c() * t + f.d()) % m;
          REQUIRE(val == 0);
          values.push_back(a.value);
        }
        REQUIRE(std::adjacent_find(values.begin(), values.end()) == values.end());
      }
    }
  }
}

TEST_CASE("local data and singular primes") {
  const auto l5 = nu_p(kF, 5);
  CHECK(l5.nu == 1);
  CHECK_FALSE(l5.singular);
  CHECK(nu_p(kF, 7).nu == 0);
  CHECK(nu_p(kF, 2).singular);
  CHECK(is_singular(kF, 3, 1));
  CHECK_FALSE(is_singular(kF, 5, 1));
  CHECK(is_singular(kF, 5, 5));
  CHECK(singular_primes(kF) == std::vector<uint64_t>{2, 3});
  CHECK_THROWS_AS(singular_primes({0, 1, 1, 1}), Unsupported);
  for (uint64_t p : arith::primes_up_to(500)) {
    const auto l = nu_p(kF, p);
    if (l.singular) continue;
    const auto r = roots_mod_p(kF, p);
    CHECK(r.all_simple());
    CHECK(l.nu == r.count());
  }
}

TEST_CASE("gamma examples") {
  CHECK(gamma_F(kF, 2).gamma == 2);
  CHECK(gamma_F(kF, 5).gamma == 5);
  CHECK(gamma_F(kF, 10).gamma == 10);
  CHECK(gamma_F(kF, 1).gamma == 1);
}

TEST_CASE("gamma against brute force, including non-primitive forms") {
  const BinaryCubicForm forms[] = {kF, {1, -1, -2, 1}, {3, 1, -4, 2}, {2, 0, 0, 4},
                                   {4, 2, 0, 8}, {9, 0, 3, 27}, {0, 1, 1, 1}};
  for (const auto& f : forms) {
    for (uint64_t d = 1; d <= 81; ++d) {
      REQUIRE(gamma_F(f, d).gamma == gamma_bruteforce(f, d));
    }
  }
}

TEST_CASE("solution pairs are exactly the zeros mod p^k") {
  for (const BinaryCubicForm f : {kF, BinaryCubicForm(3, 1, -4, 2), BinaryCubicForm(2, 0, 0, 4)}) {
    for (uint64_t p : {2, 3, 5}) {
      for (unsigned k = 1; k <= 3; ++k) {
        uint64_t pk = 1;
        for (unsigned i = 0; i < k; ++i) pk *= p;
        auto pairs = solution_pairs(f, p, k);
        std::sort(pairs.begin(), pairs.end());
        std::vector<ResiduePair> expect;
        for (uint64_t a = 0; a < pk; ++a) {
          for (uint64_t b = 0; b < pk; ++b) {
            if (evaluate(f, a, b) % static_cast<i128>(pk) == 0) expect.emplace_back(a, b);
          }
        }
        REQUIRE(pairs == expect);
        REQUIRE(gamma_prime_power(f, p, k) == expect.size());
      }
    }
  }
}

TEST_CASE("prime identity gamma(p) = r(p)(p-1) + 1") {
  for (uint64_t p : arith::primes_up_to(300)) {
    const auto r = roots_mod_p(kF, p);
    CHECK(gamma_prime_power(kF, p, 1) == u128{r.count()} * (p - 1) + 1);
  }
}

TEST_CASE("cache matches direct computation") {
  LocalDataCache cache(kF);
  for (uint64_t p : arith::primes_up_to(200)) {
    const auto a = cache.get(p);
    const auto b = nu_p(kF, p);
    CHECK(a.nu == b.nu);
    CHECK(a.singular == b.singular);
  }
}
