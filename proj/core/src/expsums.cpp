#include "cubeval/expsums.hpp"

#include <cmath>
#include <numbers>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"

namespace cubeval::expsum {
namespace {

uint64_t mod_signed(int64_t v, uint64_t m) {
  auto r = static_cast<i128>(v) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<uint64_t>(r);
}

uint64_t prime_power(uint64_t p, unsigned k) {
  uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (r > kBruteForceModulusCap * kBruteForceModulusCap / p) {
      throw CapacityError("exponential sum modulus too large");
    }
    r *= p;
  }
  return r;
}

// e(num / den) with num already reduced modulo den.
std::complex<double> unit_phase(uint64_t num, uint64_t den) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) /
                       static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

unsigned valuation(uint64_t v, uint64_t p, unsigned cap) {
  unsigned e = 0;
  while (e < cap && v % p == 0) {
    v /= p;
    ++e;
  }
  return e;
}

// S^(1)(g1, g2; P^k) with a = 0, q = 1, for a degree-one prime P above p.
// P^j | (g2 w1 - g1 w2) becomes p^j | (g1 omega + g2) under the slope
// convention n1 == omega n2.
ClosedForm restricted_closed(uint64_t p, unsigned k, uint64_t omega, int64_t g1,
                             int64_t g2) {
  const uint64_t pk = prime_power(p, k);
  const uint64_t pk1 = pk / p;
  const uint64_t r1 = mod_signed(g1, pk), r2 = mod_signed(g2, pk);
  const unsigned k0 = std::min(r1 == 0 ? k : valuation(r1, p, k),
                               r2 == 0 ? k : valuation(r2, p, k));
  if (k0 >= k) {
    // All phases vanish: count of pairs with n2 a unit.
    return {static_cast<double>((p - 1) * pk1), Branch::kFull, k};
  }
  if (k0 > 0) {
    // S^(1)(g; P^k) = p^k0 S^(1)(g / p^k0; P^(k - k0)).
    uint64_t scale = 1;
    for (unsigned i = 0; i < k0; ++i) scale *= p;
    const uint64_t inner_mod = pk / scale;
    ClosedForm inner = restricted_closed(p, k - k0, omega % inner_mod,
                                         static_cast<int64_t>(r1 / scale),
                                         static_cast<int64_t>(r2 / scale));
    inner.value *= static_cast<double>(scale);
    inner.reduced_by = k0;
    return inner;
  }
  const uint64_t c = (arith::mulmod(r1, omega % pk, pk) + r2) % pk;
  const unsigned v = c == 0 ? k : valuation(c, p, k);
  if (v >= k) return {static_cast<double>((p - 1) * pk1), Branch::kFull, 0};
  if (v == k - 1) return {-static_cast<double>(pk1), Branch::kMinus, 0};
  return {0.0, Branch::kZero, 0};
}

}  // namespace

void validate(const BinaryCubicForm& form, const ExpSumSpec& spec) {
  if (spec.k == 0) throw InvalidInput("exponent k must be >= 1");
  if (!arith::is_prime(spec.p)) throw InvalidInput("p must be prime");
  if (spec.q == 0 || spec.q % spec.p == 0) throw InvalidInput("need gcd(q, p) = 1");
  const uint64_t pk = prime_power(spec.p, spec.k);
  // F(omega, 1) mod p^k computed with modular Horner steps.
  uint64_t acc = 0;
  for (int64_t coef : form.coefficients()) {
    acc = (arith::mulmod(acc, spec.omega % pk, pk) + mod_signed(coef, pk)) % pk;
  }
  if (acc != 0) {
    throw InvalidInput("omega is not a root of F(t, 1) modulo p^k");
  }
}

std::complex<double> exp_sum_bruteforce(const ExpSumSpec& spec) {
  if (spec.q == 0 || spec.q % spec.p == 0) throw InvalidInput("need gcd(q, p) = 1");
  const uint64_t pk = prime_power(spec.p, spec.k);
  if (pk > kBruteForceModulusCap) {
    throw CapacityError("brute-force exponential sum limited to p^k <= 10^4");
  }
  const uint64_t q = spec.q % pk;
  const uint64_t a1 = mod_signed(spec.a1, pk), a2 = mod_signed(spec.a2, pk);
  const uint64_t g1 = mod_signed(spec.g1, pk), g2 = mod_signed(spec.g2, pk);
  const uint64_t omega = spec.omega % pk;
  std::complex<double> total = 0;
  for (uint64_t n2 = 0; n2 < pk; ++n2) {
    const uint64_t m2 = (a2 + arith::mulmod(n2, q, pk)) % pk;
    const uint64_t target = arith::mulmod(omega, m2, pk);
    for (uint64_t n1 = 0; n1 < pk; ++n1) {
      const uint64_t m1 = (a1 + arith::mulmod(n1, q, pk)) % pk;
      if (m1 != target) continue;
      if (spec.restricted && m1 % spec.p == 0 && m2 % spec.p == 0) continue;
      const uint64_t phase = (arith::mulmod(g1, n1, pk) + arith::mulmod(g2, n2, pk)) % pk;
      total += unit_phase(phase, pk);
    }
  }
  return total;
}

std::complex<double> progression_sum(uint64_t modulus, uint64_t omega, int64_t g1,
                                     int64_t g2) {
  if (modulus == 0 || modulus > kBruteForceModulusCap) {
    throw CapacityError("progression sum modulus out of range");
  }
  const uint64_t r1 = mod_signed(g1, modulus), r2 = mod_signed(g2, modulus);
  std::complex<double> total = 0;
  for (uint64_t n2 = 0; n2 < modulus; ++n2) {
    const uint64_t n1 = arith::mulmod(omega % modulus, n2, modulus);
    const uint64_t phase =
        (arith::mulmod(r1, n1, modulus) + arith::mulmod(r2, n2, modulus)) % modulus;
    total += unit_phase(phase, modulus);
  }
  return total;
}

ClosedForm exp_sum_closed(const BinaryCubicForm& form, const ExpSumSpec& spec) {
  validate(form, spec);
  if (local::is_singular(form, spec.p, spec.q)) {
    throw Unsupported("closed form needs a prime outside the singular set");
  }
  const uint64_t pk = prime_power(spec.p, spec.k);
  const uint64_t qinv = arith::invmod(spec.q % pk, pk);
  const uint64_t ag = (arith::mulmod(mod_signed(spec.a1, pk), mod_signed(spec.g1, pk), pk) +
                       arith::mulmod(mod_signed(spec.a2, pk), mod_signed(spec.g2, pk), pk)) %
                      pk;
  // e(-(a1 g1 + a2 g2) q^-1 / p^k)
  const uint64_t shift = (pk - arith::mulmod(ag, qinv, pk)) % pk;
  const std::complex<double> twist = unit_phase(shift, pk);

  if (spec.restricted) {
    ClosedForm out = restricted_closed(spec.p, spec.k, spec.omega % pk, spec.g1, spec.g2);
    out.value *= twist;
    return out;
  }
  const uint64_t c = (arith::mulmod(mod_signed(spec.g1, pk), spec.omega % pk, pk) +
                      mod_signed(spec.g2, pk)) %
                     pk;
  if (c != 0) return {0.0, Branch::kZero, 0};
  return {static_cast<double>(pk) * twist, Branch::kFull, 0};
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::kFull: return "full";
    case Branch::kMinus: return "minus";
    case Branch::kZero: return "zero";
  }
  return "?";
}

}  // namespace cubeval::expsum
