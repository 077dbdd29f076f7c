#include "cubeval/localdata.hpp"

#include <algorithm>
#include <array>
#include <mutex>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"

namespace cubeval::local {
namespace {

using arith::mulmod;
using Poly = std::vector<uint64_t>;  // coefficient of t^i at index i

constexpr uint64_t kBruteRootBound = 64;

uint64_t reduce(int64_t v, uint64_t m) {
  auto r = static_cast<int64_t>(static_cast<i128>(v) % static_cast<i128>(m));
  return r < 0 ? static_cast<uint64_t>(r + static_cast<int64_t>(m))
               : static_cast<uint64_t>(r);
}

uint64_t addmod(uint64_t a, uint64_t b, uint64_t m) {
  u128 s = static_cast<u128>(a) + b;
  return static_cast<uint64_t>(s >= m ? s - m : s);
}

uint64_t submod(uint64_t a, uint64_t b, uint64_t m) {
  return a >= b ? a - b : static_cast<uint64_t>(static_cast<u128>(a) + m - b);
}

uint64_t ipow(uint64_t p, unsigned k) {
  uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (r > UINT64_MAX / p) throw CapacityError("prime power exceeds 64 bits");
    r *= p;
  }
  return r;
}

// F(t, s) reduced modulo m, as a polynomial in t for fixed s.
struct CubicMod {
  uint64_t m;
  std::array<uint64_t, 4> c;  // t^3, t^2, t, 1

  CubicMod(const BinaryCubicForm& f, uint64_t s, uint64_t modulus) : m(modulus) {
    uint64_t s_red = s % m;
    uint64_t s2 = mulmod(s_red, s_red, m);
    uint64_t s3 = mulmod(s2, s_red, m);
    c = {reduce(f.a(), m), mulmod(reduce(f.b(), m), s_red, m),
         mulmod(reduce(f.c(), m), s2, m), mulmod(reduce(f.d(), m), s3, m)};
  }

  uint64_t operator()(uint64_t t) const {
    t %= m;
    uint64_t acc = c[0];
    for (int i = 1; i < 4; ++i) acc = addmod(mulmod(acc, t, m), c[i], m);
    return acc;
  }

  uint64_t derivative(uint64_t t) const {
    t %= m;
    uint64_t acc = mulmod(3 % m, c[0], m);
    acc = addmod(mulmod(acc, t, m), mulmod(2 % m, c[1], m), m);
    return addmod(mulmod(acc, t, m), c[2], m);
  }
};

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

// Quotient and remainder of a / b over F_p; b nonzero.
std::pair<Poly, Poly> divmod(Poly a, const Poly& b, uint64_t p) {
  trim(a);
  const int db = degree(b);
  const uint64_t lead_inv = arith::invmod(b.back(), p);
  Poly quot(std::max(0, degree(a) - db + 1), 0);
  while (degree(a) >= db) {
    const int shift = degree(a) - db;
    const uint64_t coef = mulmod(a.back(), lead_inv, p);
    quot[shift] = coef;
    for (int i = 0; i <= db; ++i) {
      a[shift + i] = submod(a[shift + i], mulmod(coef, b[i], p), p);
    }
    trim(a);
  }
  trim(quot);
  return {quot, a};
}

Poly mulmod_poly(const Poly& a, const Poly& b, const Poly& mod, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j], p), p);
    }
  }
  return divmod(std::move(prod), mod, p).second;
}

Poly powmod_poly(Poly base, uint64_t e, const Poly& mod, uint64_t p) {
  Poly result{1};
  base = divmod(base, mod, p).second;
  while (e != 0) {
    if (e & 1) result = mulmod_poly(result, base, mod, p);
    base = mulmod_poly(base, base, mod, p);
    e >>= 1;
  }
  return result;
}

Poly monic(Poly a, uint64_t p) {
  trim(a);
  if (a.empty()) return a;
  const uint64_t inv = arith::invmod(a.back(), p);
  for (auto& v : a) v = mulmod(v, inv, p);
  return a;
}

Poly gcd_poly(Poly a, Poly b, uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(a, b, p).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(std::move(a), p);
}

// Roots of a monic squarefree polynomial that splits into linear factors
// over F_p, p odd. Equal-degree splitting with shifts delta = 0, 1, 2, ...
void split_roots(const Poly& g, uint64_t p, std::vector<uint64_t>& out) {
  const int dg = degree(g);
  if (dg <= 0) return;
  if (dg == 1) {
    out.push_back(submod(0, g[0], p));
    return;
  }
  for (uint64_t delta = 0;; ++delta) {
    Poly h = powmod_poly(Poly{delta % p, 1}, (p - 1) / 2, g, p);
    if (h.empty()) h.push_back(0);
    h[0] = submod(h[0], 1, p);
    Poly d = gcd_poly(g, h, p);
    if (degree(d) > 0 && degree(d) < dg) {
      split_roots(d, p, out);
      split_roots(divmod(g, d, p).first, p, out);
      return;
    }
  }
}

unsigned root_multiplicity(const CubicMod& f, uint64_t r) {
  // Synthetic division by (t - r) while the remainder vanishes.
  const uint64_t p = f.m;
  Poly coeffs{f.c[3], f.c[2], f.c[1], f.c[0]};
  trim(coeffs);
  unsigned mult = 0;
  while (degree(coeffs) >= 1) {
    Poly quot(coeffs.size() - 1, 0);
    uint64_t carry = 0;
    for (int i = degree(coeffs); i >= 1; --i) {
      carry = addmod(mulmod(carry, r, p), coeffs[i], p);
      quot[i - 1] = carry;
    }
    uint64_t rem = addmod(mulmod(carry, r, p), coeffs[0], p);
    if (rem != 0) break;
    ++mult;
    coeffs = std::move(quot);
    trim(coeffs);
  }
  return mult;
}

// Roots modulo p^k of F(t, s) reachable from the roots modulo p listed in
// `seeds`, found by trying every digit at every level.
std::vector<uint64_t> tree_lift(const BinaryCubicForm& form, uint64_t s, uint64_t p,
                                unsigned k, std::vector<uint64_t> seeds,
                                uint64_t& budget) {
  uint64_t pj = p;
  for (unsigned j = 1; j < k; ++j) {
    const uint64_t next = pj * p;
    const CubicMod f(form, s, next);
    std::vector<uint64_t> lifted;
    for (uint64_t r : seeds) {
      for (uint64_t digit = 0; digit < p; ++digit) {
        if (budget == 0) throw CapacityError("root lifting exceeded its search cap");
        --budget;
        const uint64_t cand = r + digit * pj;
        if (f(cand) == 0) lifted.push_back(cand);
      }
    }
    seeds = std::move(lifted);
    pj = next;
  }
  return seeds;
}

void require_prime(uint64_t p) {
  if (!arith::is_prime(p)) throw InvalidInput("expected a prime, got " + std::to_string(p));
}

// Roots t of F(t, 1) modulo p^k, and roots s of F(1, s) modulo p^k with p | s.
// Together with the scalings (s r, s) and (t, t s') they cover every solution
// pair with a unit coordinate.
struct UnitColumnRoots {
  std::vector<uint64_t> affine;
  std::vector<uint64_t> at_infinity;
};

UnitColumnRoots unit_column_roots(const BinaryCubicForm& form, uint64_t p, unsigned k) {
  UnitColumnRoots out;
  for (const auto& r : lift_roots(form, p, k).affine_roots) out.affine.push_back(r.value);
  const BinaryCubicForm reversed(form.d(), form.c(), form.b(), form.a());
  for (const auto& r : lift_roots(reversed, p, k).affine_roots) {
    if (r.value % p == 0) out.at_infinity.push_back(r.value);
  }
  return out;
}

// Largest e with p^e dividing every coefficient.
unsigned content_valuation(const BinaryCubicForm& form, uint64_t p) {
  uint64_t c = form.content();
  if (c == 0) throw Unsupported("zero form");
  unsigned e = 0;
  while (c % p == 0) {
    c /= p;
    ++e;
  }
  return e;
}

BinaryCubicForm divide_content(const BinaryCubicForm& form, uint64_t p, unsigned e) {
  const auto s = static_cast<int64_t>(ipow(p, e));
  return BinaryCubicForm(form.a() / s, form.b() / s, form.c() / s, form.d() / s);
}

// gamma(p^k) = phi(p^k) (R1 + R2) + #{both coordinates divisible by p}, where
// the last term is p^(2(k-1)) for k <= 3 and p^4 gamma(p^(k-3)) beyond.
u128 singular_gamma(const BinaryCubicForm& form, uint64_t p, unsigned k) {
  if (k == 0) return 1;
  const unsigned c = content_valuation(form, p);
  if (c > 0) {
    // F = p^c G: p^k | F iff p^(k-c) | G, and each class lifts p^(2 min(c,k)) ways.
    const unsigned drop = std::min(c, k);
    u128 lift = 1;
    for (unsigned i = 0; i < 2 * drop; ++i) lift *= p;
    return lift * singular_gamma(divide_content(form, p, c), p, k - drop);
  }
  const uint64_t pk = ipow(p, k);
  const auto roots = unit_column_roots(form, p, k);
  const u128 units = static_cast<u128>(pk - pk / p);
  u128 total = units * (roots.affine.size() + roots.at_infinity.size());
  if (k <= 3) {
    u128 inner = 1;
    for (unsigned i = 0; i < 2 * (k - 1); ++i) inner *= p;
    total += inner;
  } else {
    total += static_cast<u128>(p) * p * p * p * singular_gamma(form, p, k - 3);
  }
  return total;
}

void push_pairs(std::vector<ResiduePair>& out, std::size_t limit) {
  if (out.size() > limit) throw CapacityError("solution pair list exceeds its cap");
}

void singular_pairs(const BinaryCubicForm& form, uint64_t p, unsigned k,
                    std::vector<ResiduePair>& out) {
  const uint64_t pk = ipow(p, k);
  const unsigned c = content_valuation(form, p);
  if (c > 0) {
    // Solutions of G modulo p^(k-drop), each lifted by every digit block.
    const unsigned drop = std::min(c, k);
    const uint64_t base_mod = ipow(p, k - drop);
    std::vector<ResiduePair> base;
    singular_pairs(divide_content(form, p, c), p, k - drop, base);
    for (const auto& [t, s] : base) {
      for (uint64_t t1 = t; t1 < pk; t1 += base_mod) {
        for (uint64_t s1 = s; s1 < pk; s1 += base_mod) out.emplace_back(t1, s1);
      }
      push_pairs(out, kBruteForcePairCap);
    }
    return;
  }
  if (k == 0) {
    out.emplace_back(0, 0);
    return;
  }
  const auto roots = unit_column_roots(form, p, k);
  for (uint64_t s = 1; s < pk; ++s) {
    if (s % p == 0) continue;
    for (uint64_t r : roots.affine) out.emplace_back(mulmod(r, s, pk), s);
    for (uint64_t r : roots.at_infinity) out.emplace_back(s, mulmod(r, s, pk));
    push_pairs(out, kBruteForcePairCap);
  }
  // Both coordinates divisible by p: p^k | p^3 F(t', s').
  const uint64_t inner_mod = pk / p;  // t' ranges modulo p^(k-1)
  if (k <= 3) {
    for (uint64_t t = 0; t < inner_mod; ++t) {
      for (uint64_t s = 0; s < inner_mod; ++s) out.emplace_back(t * p, s * p);
    }
    push_pairs(out, kBruteForcePairCap);
    return;
  }
  const uint64_t base_mod = ipow(p, k - 3);
  std::vector<ResiduePair> base;
  singular_pairs(form, p, k - 3, base);
  for (const auto& [t, s] : base) {
    for (uint64_t t1 = t; t1 < inner_mod; t1 += base_mod) {
      for (uint64_t s1 = s; s1 < inner_mod; s1 += base_mod) out.emplace_back(t1 * p, s1 * p);
    }
    push_pairs(out, kBruteForcePairCap);
  }
}

}  // namespace

bool ProjectiveRootSet::all_simple() const {
  return std::all_of(affine_roots.begin(), affine_roots.end(),
                     [](const AffineRoot& r) { return r.multiplicity == 1; });
}

ProjectiveRootSet roots_mod_p(const BinaryCubicForm& form, uint64_t p) {
  require_prime(p);
  const CubicMod f(form, 1, p);
  if (f.c == std::array<uint64_t, 4>{0, 0, 0, 0}) {
    throw Unsupported("form vanishes identically modulo " + std::to_string(p));
  }
  ProjectiveRootSet out;
  out.p = p;
  out.k = 1;
  out.modulus = p;
  out.has_infinity_root = f.c[0] == 0;

  std::vector<uint64_t> roots;
  if (p < kBruteRootBound) {
    for (uint64_t t = 0; t < p; ++t) {
      if (f(t) == 0) roots.push_back(t);
    }
  } else {
    Poly poly{f.c[3], f.c[2], f.c[1], f.c[0]};
    trim(poly);
    poly = monic(poly, p);
    if (degree(poly) >= 1) {
      // gcd(f, t^p - t) collects the distinct roots.
      Poly tp = powmod_poly(Poly{0, 1}, p, poly, p);
      tp.resize(std::max<std::size_t>(tp.size(), 2), 0);
      tp[1] = submod(tp[1], 1, p);
      trim(tp);
      Poly g = tp.empty() ? poly : gcd_poly(poly, tp, p);
      split_roots(g, p, roots);
    }
  }
  std::sort(roots.begin(), roots.end());
  for (uint64_t r : roots) out.affine_roots.push_back({r, root_multiplicity(f, r)});
  return out;
}

ProjectiveRootSet lift_roots(const BinaryCubicForm& form, uint64_t p, unsigned k) {
  if (k == 0) throw InvalidInput("lift_roots: exponent must be >= 1");
  ProjectiveRootSet base = roots_mod_p(form, p);
  if (k == 1) return base;
  const uint64_t pk = ipow(p, k);
  const CubicMod f(form, 1, pk);

  ProjectiveRootSet out;
  out.p = p;
  out.k = k;
  out.modulus = pk;
  out.has_infinity_root = base.has_infinity_root;
  uint64_t budget = kLiftNodeCap;
  for (const auto& root : base.affine_roots) {
    if (root.multiplicity == 1) {
      // Newton iteration; f'(r) is a unit modulo p^k.
      uint64_t r = root.value;
      for (unsigned it = 0; it <= k && f(r) != 0; ++it) {
        const uint64_t inv = arith::invmod(f.derivative(r), pk);
        r = submod(r, mulmod(f(r), inv, pk), pk);
      }
      out.affine_roots.push_back({r, 1});
    } else {
      for (uint64_t r : tree_lift(form, 1, p, k, {root.value}, budget)) {
        out.affine_roots.push_back({r, root.multiplicity});
      }
    }
  }
  std::sort(out.affine_roots.begin(), out.affine_roots.end(),
            [](const AffineRoot& l, const AffineRoot& r) { return l.value < r.value; });
  return out;
}

bool is_singular(const BinaryCubicForm& form, uint64_t p, uint64_t q) {
  if (p == 2 || p == 3) return true;
  if (q % p == 0) return true;
  if (form.a() % static_cast<int64_t>(p) == 0) return true;
  if (form.d() % static_cast<int64_t>(p) == 0) return true;
  return form.disc() % static_cast<i128>(p) == 0;
}

LocalData nu_p(const BinaryCubicForm& form, uint64_t p, uint64_t q) {
  const auto roots = roots_mod_p(form, p);
  LocalData out;
  out.p = p;
  out.nu = roots.count();
  out.singular = is_singular(form, p, q);
  out.ramified_hint = form.disc() % static_cast<i128>(p) == 0;
  return out;
}

std::vector<uint64_t> singular_primes(const BinaryCubicForm& form, uint64_t q) {
  if (q == 0 || form.a() == 0 || form.d() == 0 || form.disc() == 0) {
    throw Unsupported("every prime is singular for this form");
  }
  std::vector<uint64_t> primes{2, 3};
  for (u128 v : {static_cast<u128>(q), abs_u128(form.a()), abs_u128(form.d()),
                 abs_u128(form.disc())}) {
    const auto factored = arith::factor(v);
    for (const auto& pp : factored.factors()) {
      primes.push_back(static_cast<uint64_t>(pp.prime));
    }
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return primes;
}

u128 gamma_prime_power(const BinaryCubicForm& form, uint64_t p, unsigned k) {
  require_prime(p);
  if (k == 0) return 1;
  ipow(p, k);  // p^k must fit in 64 bits
  if (!is_singular(form, p)) {
    // Split by v = min(v_p(n1), v_p(n2)). With n = p^v m, m primitive modulo
    // p^(k-v), the condition is p^(k-3v) | F(m); primitive solutions modulo
    // p^e number r (p-1) p^(e-1) because every root is simple and p does not
    // divide the leading coefficient.
    const u128 r = roots_mod_p(form, p).count();
    u128 total = 1;  // v = k: the pair (0, 0)
    for (unsigned v = 0; v < k; ++v) {
      const int e = static_cast<int>(k) - 3 * static_cast<int>(v);
      const unsigned span = k - v;
      u128 p_span2 = 1;
      for (unsigned i = 0; i < 2 * span; ++i) p_span2 *= p;
      if (e <= 0) {
        total += p_span2 - p_span2 / (static_cast<u128>(p) * p);
      } else {
        u128 term = r * (p - 1);
        for (int i = 0; i < e - 1; ++i) term *= p;
        for (unsigned i = 0; i < 2 * (span - static_cast<unsigned>(e)); ++i) term *= p;
        total += term;
      }
    }
    return total;
  }
  return singular_gamma(form, p, k);
}

GammaValue gamma_F(const BinaryCubicForm& form, uint64_t d) {
  if (d == 0) throw InvalidInput("gamma_F: d must be >= 1");
  u128 g = 1;
  const auto factored = arith::factor(d);
  for (const auto& pp : factored.factors()) {
    g *= gamma_prime_power(form, static_cast<uint64_t>(pp.prime), pp.exponent);
  }
  return {d, g};
}

std::vector<ResiduePair> solution_pairs(const BinaryCubicForm& form, uint64_t p,
                                        unsigned k) {
  require_prime(p);
  std::vector<ResiduePair> out;
  if (k == 0) {
    out.emplace_back(0, 0);
    return out;
  }
  ipow(p, k);
  if (!is_singular(form, p)) {
    out.emplace_back(0, 0);
    uint64_t scale = 1;  // p^v
    for (unsigned v = 0; v < k; ++v, scale *= p) {
      const unsigned span = k - v;
      const uint64_t ps = ipow(p, span);
      const int e = static_cast<int>(k) - 3 * static_cast<int>(v);
      if (e <= 0) {
        for (uint64_t m1 = 0; m1 < ps; ++m1) {
          for (uint64_t m2 = 0; m2 < ps; ++m2) {
            if (m1 % p == 0 && m2 % p == 0) continue;
            out.emplace_back(m1 * scale, m2 * scale);
          }
        }
        continue;
      }
      const uint64_t pe = ipow(p, static_cast<unsigned>(e));
      const auto roots = lift_roots(form, p, static_cast<unsigned>(e));
      for (uint64_t m2 = 0; m2 < ps; ++m2) {
        if (m2 % p == 0) continue;
        for (const auto& root : roots.affine_roots) {
          const uint64_t base = mulmod(root.value, m2 % pe, pe);
          for (uint64_t m1 = base; m1 < ps; m1 += pe) {
            out.emplace_back(m1 * scale, m2 * scale);
          }
        }
      }
    }
    return out;
  }
  singular_pairs(form, p, k, out);
  return out;
}

LocalData LocalDataCache::get(uint64_t p) const {
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(p);
    if (it != memo_.end()) return it->second;
  }
  LocalData data = nu_p(form_, p, q_);
  std::unique_lock lock(mutex_);
  memo_.emplace(p, data);
  return data;
}

}  // namespace cubeval::local
