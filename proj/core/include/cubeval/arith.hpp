#pragma once

#include <cstdint>
#include <vector>

#include "cubeval/int128.hpp"

namespace cubeval::arith {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);
// Inverse of a modulo m; throws InvalidInput when gcd(a, m) != 1.
uint64_t invmod(uint64_t a, uint64_t m);
u128 gcd(u128 a, u128 b);

// Deterministic Miller-Rabin for every 64-bit input.
bool is_prime(uint64_t n);

// Miller-Rabin to the first twenty prime bases. Exact below 3.3e24, where
// the first thirteen already suffice; a strong probable-prime test above.
bool is_prime(u128 n);

// Sieve of Eratosthenes, primes <= n.
std::vector<uint64_t> primes_up_to(uint64_t n);

struct PrimePower {
  u128 prime;
  unsigned exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Complete factorization of a nonnegative 128-bit integer.
///
/// Primes are stored strictly increasing. The values 0 and 1 carry an empty
/// factor list; `is_zero()` separates them. The arithmetic accessors require
/// value >= 1.
class FactoredValue {
 public:
  FactoredValue() = default;
  FactoredValue(u128 value, std::vector<PrimePower> factors);

  static FactoredValue zero() { return FactoredValue(0, {}); }

  u128 value() const { return value_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  bool is_zero() const { return value_ == 0; }

  int mu() const;
  unsigned omega() const;
  unsigned Omega() const;
  u128 tau() const;
  // Largest prime factor; 1 for the value 1.
  u128 p_plus() const;
  // Smallest prime factor; kInfinity for the value 1.
  u128 p_minus() const;

  static constexpr u128 kInfinity = kU128Max;

  friend bool operator==(const FactoredValue&, const FactoredValue&) = default;

 private:
  void require_positive() const;

  u128 value_ = 1;
  std::vector<PrimePower> factors_;
};

// Trial division to 10^4, then Pollard-rho (Brent cycle detection) on the
// remaining cofactor. Seeds are fixed: x0 = 2, c = 1, 2, 3, ... on failure.
FactoredValue factor(u128 n);

}  // namespace cubeval::arith
