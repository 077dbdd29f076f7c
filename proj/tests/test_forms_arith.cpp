#include <doctest.h>

#include <random>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/forms.hpp"

using namespace cubeval;

TEST_CASE("evaluate small values") {
  const BinaryCubicForm f(1, 0, 0, 2);
  CHECK(evaluate(f, 1, 1) == 3);
  CHECK(evaluate(f, 0, 0) == 0);
  CHECK(evaluate(f, 3, 5) == 277);
  CHECK_THROWS_AS(evaluate(f, (1 << 20) + 1, 0), RangeError);
}

TEST_CASE("discriminant") {
  CHECK(discriminant({1, 0, 0, 2}) == -108);
  CHECK(discriminant({1, 0, 0, 1}) == -27);
  CHECK(discriminant({0, 1, 1, 1}) == -3);
  CHECK(BinaryCubicForm(1, 0, 0, 2).disc() == -108);
}

TEST_CASE("irreducibility and normalization") {
  CHECK(is_irreducible({1, 0, 0, 2}));
  CHECK_FALSE(is_irreducible({1, 0, 0, -1}));
  CHECK_FALSE(is_irreducible({0, 1, 0, 1}));
  CHECK_FALSE(is_irreducible({2, -3, 1, 0}));
  CHECK(normalize({2, 0, 0, 4}) == BinaryCubicForm(1, 0, 0, 2));
  CHECK(normalize({1, 0, 0, 2}) == BinaryCubicForm(1, 0, 0, 2));
  CHECK(normalize({-3, 0, 0, -6}) == BinaryCubicForm(-1, 0, 0, -2));
  CHECK_THROWS_AS(require_standard({2, 0, 0, 4}), InvalidInput);
  CHECK_NOTHROW(require_standard({1, 0, 0, 2}));
}

TEST_CASE("form parsing") {
  CHECK(BinaryCubicForm::parse("1,-1,-2,1") == BinaryCubicForm(1, -1, -2, 1));
  CHECK_THROWS_AS(BinaryCubicForm::parse("1,0,0"), InvalidInput);
  CHECK_THROWS_AS(BinaryCubicForm::parse("1,0,0,2,3"), InvalidInput);
  CHECK_THROWS_AS(BinaryCubicForm::parse("1,0,x,2"), InvalidInput);
  CHECK_THROWS_AS(BinaryCubicForm::parse("2000000000,0,0,1"), InvalidInput);
}

TEST_CASE("primality") {
  CHECK(arith::is_prime(uint64_t{2}));
  CHECK_FALSE(arith::is_prime(uint64_t{341}));
  CHECK(arith::is_prime((uint64_t{1} << 61) - 1));
  CHECK_FALSE(arith::is_prime(uint64_t{3215031751}));  // strong pseudoprime to 2, 3, 5, 7
  const u128 m127 = (u128{1} << 127) - 1;
  CHECK(arith::is_prime(m127));
  CHECK_FALSE(arith::is_prime(u128{1000000007} * 998244353));
}

TEST_CASE("primality agrees with a sieve below 10^5") {
  const auto primes = arith::primes_up_to(100'000);
  std::vector<bool> flag(100'001, false);
  for (uint64_t p : primes) flag[p] = true;
  for (uint64_t n = 0; n <= 100'000; ++n) REQUIRE(arith::is_prime(n) == flag[n]);
}

TEST_CASE("factor examples") {
  CHECK(arith::factor(1).factors().empty());
  CHECK_FALSE(arith::factor(1).is_zero());
  CHECK(arith::factor(0).is_zero());
  const auto f277 = arith::factor(277);
  REQUIRE(f277.factors().size() == 1);
  CHECK(f277.factors()[0] == arith::PrimePower{277, 1});
  const auto big = arith::factor(u128{1000000007} * 998244353);
  REQUIRE(big.factors().size() == 2);
  CHECK(big.factors()[0] == arith::PrimePower{998244353, 1});
  CHECK(big.factors()[1] == arith::PrimePower{1000000007, 1});

  const auto twelve = arith::factor(12);
  CHECK(twelve.mu() == 0);
  CHECK(twelve.omega() == 2);
  CHECK(twelve.Omega() == 3);
  CHECK(twelve.tau() == 6);
  CHECK(twelve.p_plus() == 3);
  const auto one = arith::factor(1);
  CHECK(one.mu() == 1);
  CHECK(one.omega() == 0);
  CHECK(one.tau() == 1);
  CHECK(one.p_plus() == 1);
  const auto thirty = arith::factor(30);
  CHECK(thirty.mu() == -1);
  CHECK(thirty.omega() == 3);
  CHECK(thirty.tau() == 8);
  CHECK(thirty.p_plus() == 5);
}

TEST_CASE("factorization products reconstruct random 128-bit values") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    u128 n = (u128{rng()} << 24) ^ rng();
    if (n == 0) continue;
    const auto fv = arith::factor(n);
    u128 prod = 1;
    u128 prev = 1;
    for (const auto& pp : fv.factors()) {
      REQUIRE(pp.prime > prev);
      REQUIRE(arith::is_prime(pp.prime));
      for (unsigned e = 0; e < pp.exponent; ++e) prod *= pp.prime;
      prev = pp.prime;
    }
    REQUIRE(prod == n);
  }
}

TEST_CASE("semiprime of two 40-bit primes") {
  const uint64_t p = 1099511627689ull;  // 2^40 - 87
  const uint64_t q = 1099511627609ull;  // 2^40 - 167
  REQUIRE(arith::is_prime(p));
  REQUIRE(arith::is_prime(q));
  const auto fv = arith::factor(u128{p} * q);
  REQUIRE(fv.factors().size() == 2);
  CHECK(fv.factors()[0].prime == q);
  CHECK(fv.factors()[1].prime == p);
}

TEST_CASE("int128 text round trip") {
  const i128 v = -(i128{1} << 100) + 12345;
  CHECK(parse_i128(to_string(v)) == v);
  CHECK(to_string(u128{0}) == "0");
  CHECK(isqrt(u128{1} << 100) == u128{1} << 50);
  CHECK(isqrt(uint64_t{99}) == 9);
}
