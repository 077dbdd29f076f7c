#pragma once

#include <complex>
#include <cstdint>

#include "cubeval/forms.hpp"

namespace cubeval::expsum {

// Largest p^k accepted by the direct summation.
inline constexpr uint64_t kBruteForceModulusCap = 10'000;

/// A complete exponential sum over the progression
///   a1 + n1 q == omega (a2 + n2 q)  (mod p^k),   0 <= n1, n2 < p^k,
/// with phase e((g1 n1 + g2 n2) / p^k). With `restricted` set, pairs whose
/// shifted arguments a_i + n_i q are both divisible by p are dropped.
///
/// For a degree-one prime ideal P above p with n1 == omega n2 (mod p^k)
/// describing P^k | (n1 w1 + n2 w2), this is S(g1, g2; P^k), and with
/// restricted set and a = 0, q = 1 it is S^(1)(g1, g2; P^k).
struct ExpSumSpec {
  uint64_t p = 0;
  unsigned k = 1;
  uint64_t omega = 0;
  int64_t g1 = 0;
  int64_t g2 = 0;
  int64_t a1 = 0;
  int64_t a2 = 0;
  uint64_t q = 1;
  bool restricted = false;
};

enum class Branch {
  kFull,      // p^k, or (p-1) p^(k-1) when restricted
  kMinus,     // -p^(k-1), restricted only
  kZero,
};

struct ClosedForm {
  std::complex<double> value;
  Branch branch = Branch::kZero;
  // Exponent of p in gcd(g1, g2, p^k) used by the reduction step; 0 when the
  // phases are already coprime to p.
  unsigned reduced_by = 0;
};

// Throws InvalidInput unless omega is a root of F(t, 1) modulo p^k and
// gcd(q, p) = 1.
void validate(const BinaryCubicForm& form, const ExpSumSpec& spec);

// Direct summation over the p^k pairs of the progression.
std::complex<double> exp_sum_bruteforce(const ExpSumSpec& spec);

// Same sum over an arbitrary modulus N with progression slope omega mod N,
// a = 0 and q = 1. Used to check multiplicativity across coprime moduli.
std::complex<double> progression_sum(uint64_t modulus, uint64_t omega, int64_t g1,
                                     int64_t g2);

// Closed form. Throws Unsupported at primes singular for (F, q).
ClosedForm exp_sum_closed(const BinaryCubicForm& form, const ExpSumSpec& spec);

const char* to_string(Branch b);

}  // namespace cubeval::expsum
