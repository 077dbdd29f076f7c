#include "cubeval/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <span>

#include "cubeval/errors.hpp"

namespace cubeval::arith {
namespace {

constexpr uint64_t kTrialBound = 10000;

const std::vector<uint64_t>& small_primes() {
  static const std::vector<uint64_t> primes = primes_up_to(kTrialBound);
  return primes;
}

// Montgomery arithmetic modulo an odd 64-bit n, R = 2^64.
class Mont64 {
 public:
  using T = uint64_t;

  explicit Mont64(uint64_t n) : n_(n) {
    uint64_t inv = n;
    for (int i = 0; i < 6; ++i) inv *= 2 - n * inv;
    inv_ = inv;
    r2_ = static_cast<uint64_t>((static_cast<u128>(-n % n) * (-n % n)) % n);
  }

  uint64_t modulus() const { return n_; }
  uint64_t reduce(u128 t) const {
    uint64_t m = static_cast<uint64_t>(t) * inv_;
    auto tm = static_cast<uint64_t>((static_cast<u128>(m) * n_) >> 64);
    auto hi = static_cast<uint64_t>(t >> 64);
    return hi >= tm ? hi - tm : hi - tm + n_;
  }
  uint64_t to(uint64_t a) const { return mul(a % n_, r2_); }
  uint64_t from(uint64_t a) const { return reduce(a); }
  uint64_t mul(uint64_t a, uint64_t b) const {
    return reduce(static_cast<u128>(a) * b);
  }
  uint64_t add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return (s < a || s >= n_) ? s - n_ : s;
  }
  uint64_t sub(uint64_t a, uint64_t b) const {
    return a >= b ? a - b : a - b + n_;
  }

 private:
  uint64_t n_;
  uint64_t inv_;
  uint64_t r2_;
};

// High 128 bits of a 128x128 product.
u128 mul_hi(u128 a, u128 b) {
  const u128 mask = (u128(1) << 64) - 1;
  u128 a0 = a & mask, a1 = a >> 64, b0 = b & mask, b1 = b >> 64;
  u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
  u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
  return p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
}

u128 mulmod_slow(u128 a, u128 b, u128 m) {
  a %= m;
  b %= m;
  u128 r = 0;
  while (b != 0) {
    if (b & 1) r = (r >= m - a) ? r - (m - a) : r + a;
    a = (a >= m - a) ? a - (m - a) : a + a;
    b >>= 1;
  }
  return r;
}

// Montgomery arithmetic modulo an odd 128-bit n, R = 2^128.
class Mont128 {
 public:
  using T = u128;

  explicit Mont128(u128 n) : n_(n) {
    u128 inv = n;
    for (int i = 0; i < 7; ++i) inv *= 2 - n * inv;
    inv_ = inv;
    u128 r = (u128(0) - n) % n;
    r2_ = mulmod_slow(r, r, n);
  }

  u128 modulus() const { return n_; }
  u128 mul(u128 a, u128 b) const {
    u128 lo = a * b;
    u128 hi = mul_hi(a, b);
    u128 m = lo * inv_;
    u128 mh = mul_hi(m, n_);
    return hi >= mh ? hi - mh : hi - mh + n_;
  }
  u128 to(u128 a) const { return mul(a % n_, r2_); }
  u128 from(u128 a) const { return mul(a, 1); }
  u128 add(u128 a, u128 b) const {
    u128 s = a + b;
    return (s < a || s >= n_) ? s - n_ : s;
  }
  u128 sub(u128 a, u128 b) const { return a >= b ? a - b : a - b + n_; }

 private:
  u128 n_;
  u128 inv_;
  u128 r2_;
};

template <class M>
typename M::T mont_pow(const M& mt, typename M::T base, u128 exp) {
  using T = typename M::T;
  T result = mt.to(1);
  while (exp != 0) {
    if (exp & 1) result = mt.mul(result, base);
    base = mt.mul(base, base);
    exp >>= 1;
  }
  return result;
}

template <class M>
bool miller_rabin(const M& mt, u128 n, std::span<const uint64_t> bases) {
  using T = typename M::T;
  u128 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  const T one = mt.to(1);
  const T minus_one = mt.sub(mt.to(0), one);
  for (uint64_t base : bases) {
    u128 b = base % n;
    if (b == 0) continue;
    T x = mont_pow(mt, mt.to(static_cast<T>(b)), d);
    if (x == one || x == minus_one) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mt.mul(x, x);
      if (x == minus_one) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

template <class M>
typename M::T brent_rho(const M& mt, typename M::T c_plain) {
  using T = typename M::T;
  const T n = mt.modulus();
  const T c = mt.to(c_plain);
  auto f = [&](T v) { return mt.add(mt.mul(v, v), c); };
  auto absdiff = [&](T a, T b) { return a >= b ? a - b : b - a; };
  constexpr int kBatch = 128;

  T y = mt.to(2), x = y, ys = y, q = mt.to(1);
  T g = 1;
  uint64_t r = 1;
  do {
    x = y;
    for (uint64_t i = 0; i < r; ++i) y = f(y);
    uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      uint64_t steps = std::min<uint64_t>(kBatch, r - k);
      for (uint64_t i = 0; i < steps; ++i) {
        y = f(y);
        q = mt.mul(q, absdiff(x, y));
      }
      g = static_cast<T>(gcd(q, n));
      k += steps;
    }
    r *= 2;
  } while (g == 1);
  if (g == n) {
    do {
      ys = f(ys);
      g = static_cast<T>(gcd(absdiff(x, ys), n));
    } while (g == 1);
  }
  return g;
}

// Returns a nontrivial divisor of the odd composite n.
u128 find_divisor(u128 n) {
  for (uint64_t c = 1;; ++c) {
    u128 g;
    if (n >> 64 == 0) {
      Mont64 mt(static_cast<uint64_t>(n));
      g = brent_rho(mt, static_cast<uint64_t>(c));
    } else {
      Mont128 mt(n);
      g = brent_rho(mt, static_cast<u128>(c));
    }
    if (g != 1 && g != n) return g;
  }
}

}  // namespace

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<u128>(a) * b % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
  if (m == 1) return 0;
  uint64_t result = 1;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

uint64_t invmod(uint64_t a, uint64_t m) {
  if (m == 1) return 0;
  i128 old_r = a % m, r = m, old_s = 1, s = 0;
  while (r != 0) {
    i128 quot = old_r / r;
    i128 tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw InvalidInput("value is not invertible modulo m");
  i128 res = old_s % static_cast<i128>(m);
  if (res < 0) res += m;
  return static_cast<uint64_t>(res);
}

u128 gcd(u128 a, u128 b) {
  if (a == 0) return b;
  if (b == 0) return a;
  auto ctz = [](u128 v) {
    auto lo = static_cast<uint64_t>(v);
    return lo != 0 ? std::countr_zero(lo)
                   : 64 + std::countr_zero(static_cast<uint64_t>(v >> 64));
  };
  int shift = ctz(a | b);
  a >>= ctz(a);
  do {
    b >>= ctz(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  // Sinclair's seven bases are a proven witness set for n < 2^64.
  static constexpr std::array<uint64_t, 7> kBases = {
      2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  return miller_rabin(Mont64(n), n, kBases);
}

bool is_prime(u128 n) {
  if (n >> 64 == 0) return is_prime(static_cast<uint64_t>(n));
  if ((n & 1) == 0) return false;
  static constexpr std::array<uint64_t, 20> kBases = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  for (uint64_t p : kBases) {
    if (n % p == 0) return false;
  }
  return miller_rabin(Mont128(n), n, kBases);
}

std::vector<uint64_t> primes_up_to(uint64_t n) {
  std::vector<uint64_t> primes;
  if (n < 2) return primes;
  std::vector<bool> composite(n + 1, false);
  for (uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    if (i <= n / i) {
      for (uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
  }
  return primes;
}

FactoredValue::FactoredValue(u128 value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)) {}

void FactoredValue::require_positive() const {
  if (value_ == 0) throw InvalidInput("arithmetic function of 0 is undefined");
}

int FactoredValue::mu() const {
  require_positive();
  for (const auto& f : factors_) {
    if (f.exponent > 1) return 0;
  }
  return (factors_.size() % 2 == 0) ? 1 : -1;
}

unsigned FactoredValue::omega() const {
  require_positive();
  return static_cast<unsigned>(factors_.size());
}

unsigned FactoredValue::Omega() const {
  require_positive();
  unsigned total = 0;
  for (const auto& f : factors_) total += f.exponent;
  return total;
}

u128 FactoredValue::tau() const {
  require_positive();
  u128 t = 1;
  for (const auto& f : factors_) t *= f.exponent + 1;
  return t;
}

u128 FactoredValue::p_plus() const {
  require_positive();
  return factors_.empty() ? 1 : factors_.back().prime;
}

u128 FactoredValue::p_minus() const {
  require_positive();
  return factors_.empty() ? kInfinity : factors_.front().prime;
}

FactoredValue factor(u128 n) {
  if (n == 0) return FactoredValue::zero();
  std::vector<PrimePower> out;
  for (uint64_t p : small_primes()) {
    if (static_cast<u128>(p) * p > n) break;
    if (n % p != 0) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  std::vector<u128> large;
  std::vector<u128> pending;
  if (n > 1) pending.push_back(n);
  while (!pending.empty()) {
    u128 m = pending.back();
    pending.pop_back();
    if (m < static_cast<u128>(kTrialBound) * kTrialBound || is_prime(m)) {
      large.push_back(m);
      continue;
    }
    u128 d = find_divisor(m);
    pending.push_back(d);
    pending.push_back(m / d);
  }
  std::sort(large.begin(), large.end());
  for (u128 p : large) {
    if (!out.empty() && out.back().prime == p) {
      ++out.back().exponent;
    } else {
      out.push_back({p, 1});
    }
  }
  u128 value = 1;
  for (const auto& f : out) {
    for (unsigned i = 0; i < f.exponent; ++i) value *= f.prime;
  }
  return FactoredValue(value, std::move(out));
}

}  // namespace cubeval::arith
