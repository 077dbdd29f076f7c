#include "cubeval/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/parallel.hpp"

namespace cubeval::grid {
namespace {

// Rows handled together so one prime's hits stay in cache.
constexpr uint64_t kRowBlock = 16;

uint64_t reduce(i128 v, uint64_t m) {
  auto r = v % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<uint64_t>(r);
}

struct PrimePlan {
  uint64_t p = 0;
  bool direct = false;  // singular: trial division on every cell
  std::vector<uint64_t> moduli;               // p^j, j = 1 .. depth
  std::vector<std::vector<uint64_t>> roots;   // affine roots modulo p^j
  std::vector<uint64_t> qinv;                 // q^-1 modulo p^j
  std::vector<uint64_t> a1;                   // a1 modulo p^j
  uint64_t zero_row = 0, zero_col = 0;        // n mod p with m == 0 (mod p)
};

struct Plan {
  uint64_t bound = 0;
  std::vector<PrimePlan> primes;
};

Plan build_plan(const BinaryCubicForm& form, const SieveRegion& region, uint64_t bound,
                unsigned kmax, unsigned threads) {
  Plan plan;
  plan.bound = bound;
  const auto primes = arith::primes_up_to(bound);
  plan.primes.resize(primes.size());
  parallel_blocks(primes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      PrimePlan& pp = plan.primes[i];
      const uint64_t p = primes[i];
      pp.p = p;
      if (local::is_singular(form, p, region.q)) {
        pp.direct = true;
        continue;
      }
      unsigned depth = 1;
      uint64_t mod = p;
      while (depth < kmax && mod <= region.x / p) {
        mod *= p;
        ++depth;
      }
      mod = 1;
      for (unsigned j = 1; j <= depth; ++j) {
        mod *= p;
        pp.moduli.push_back(mod);
        std::vector<uint64_t> r;
        for (const auto& root : local::lift_roots(form, p, j).affine_roots) {
          r.push_back(root.value);
        }
        pp.roots.push_back(std::move(r));
        pp.qinv.push_back(arith::invmod(region.q % mod, mod));
        pp.a1.push_back(reduce(region.a1, mod));
      }
      // n == -a q^-1 (mod p) makes m divisible by p.
      const uint64_t qi = pp.qinv[0];
      pp.zero_col = arith::mulmod(reduce(-static_cast<i128>(region.a1), p), qi, p);
      pp.zero_row = arith::mulmod(reduce(-static_cast<i128>(region.a2), p), qi, p);
    }
  });
  return plan;
}

inline bool divisible(const Cell& c, uint64_t p) {
  if (static_cast<uint64_t>(c.cofactor >> 64) == 0) {
    return static_cast<uint64_t>(c.cofactor) % p == 0;
  }
  return c.cofactor % p == 0;
}

inline void divide(Cell& c, uint64_t p) {
  if (static_cast<uint64_t>(c.cofactor >> 64) == 0) {
    c.cofactor = static_cast<uint64_t>(c.cofactor) / p;
  } else {
    c.cofactor /= p;
  }
}

// Records one more factor p for a cell that already carried e - 1 of them.
inline void bump(Cell& c, uint64_t p, unsigned e) {
  divide(c, p);
  ++c.Omega;
  if (e == 1) {
    ++c.omega;
    c.largest = std::max(c.largest, p);
  }
  c.tau = c.tau / e * (e + 1);
  c.max_exponent = static_cast<uint8_t>(std::max<unsigned>(c.max_exponent, e));
}

// Divides out every remaining p, given e factors already taken.
inline void finish(Cell& c, uint64_t p, unsigned e) {
  if (c.cofactor == 0) return;
  while (divisible(c, p)) bump(c, p, ++e);
}

void sieve_block(const Plan& plan, const SieveRegion& region, Cell* cells,
                 uint64_t row_first, uint64_t rows, uint64_t band_first) {
  const uint64_t x = region.x;
  for (const PrimePlan& pp : plan.primes) {
    const uint64_t p = pp.p;
    if (pp.direct) {
      for (uint64_t r = 0; r < rows; ++r) {
        Cell* row = cells + (row_first + r - band_first) * x;
        for (uint64_t i = 0; i < x; ++i) finish(row[i], p, 0);
      }
      continue;
    }
    const auto depth = static_cast<unsigned>(pp.moduli.size());
    for (unsigned j = 1; j <= depth; ++j) {
      const uint64_t mod = pp.moduli[j - 1];
      const uint64_t qinv = pp.qinv[j - 1], a1 = pp.a1[j - 1];
      for (uint64_t r = 0; r < rows; ++r) {
        const uint64_t n2 = row_first + r + 1;
        const i128 m2 = region.a2 + static_cast<i128>(n2) * region.q;
        const uint64_t m2r = reduce(m2, mod);
        if (m2r % p == 0) continue;
        Cell* row = cells + (row_first + r - band_first) * x;
        for (uint64_t root : pp.roots[j - 1]) {
          // a1 + n1 q == root m2 (mod p^j)
          const uint64_t target = (arith::mulmod(root, m2r, mod) + mod - a1) % mod;
          uint64_t n1 = arith::mulmod(target, qinv, mod);
          if (n1 == 0) n1 = mod;
          for (; n1 <= x; n1 += mod) {
            Cell& c = row[n1 - 1];
            bump(c, p, j);
            if (j == depth) finish(c, p, j);
          }
        }
      }
    }
    // Both m1 and m2 divisible by p.
    for (uint64_t r = 0; r < rows; ++r) {
      const uint64_t n2 = row_first + r + 1;
      if (n2 % p != pp.zero_row) continue;
      Cell* row = cells + (row_first + r - band_first) * x;
      uint64_t n1 = pp.zero_col == 0 ? p : pp.zero_col;
      for (; n1 <= x; n1 += p) finish(row[n1 - 1], p, 0);
    }
  }
}

void init_rows(const BinaryCubicForm& form, const SieveRegion& region, Cell* cells,
               uint64_t row_first, uint64_t rows, uint64_t band_first) {
  for (uint64_t r = 0; r < rows; ++r) {
    const uint64_t n2 = row_first + r + 1;
    const auto m2 = static_cast<int64_t>(region.a2 + static_cast<i128>(n2) * region.q);
    Cell* row = cells + (row_first + r - band_first) * region.x;
    for (uint64_t n1 = 1; n1 <= region.x; ++n1) {
      const auto m1 = static_cast<int64_t>(region.a1 + static_cast<i128>(n1) * region.q);
      const i128 v = evaluate(form, m1, m2);
      row[n1 - 1] = Cell{abs_u128(v), 1, 1, 0, 0, 0};
    }
  }
}

}  // namespace

struct GridAccess {
  static SieveGrid run_rows(const BinaryCubicForm& form, const SieveRegion& region,
                            const SieveOptions& options, const Plan& plan,
                            uint64_t row_begin, uint64_t row_end);
};

void validate(const SieveRegion& region) {
  if (region.x == 0) throw InvalidInput("x must be >= 1");
  if (region.q == 0) throw InvalidInput("q must be >= 1");
  const i128 lim = BinaryCubicForm::kMaxArgument;
  for (int64_t a : {region.a1, region.a2}) {
    const i128 lo = a + static_cast<i128>(region.q);
    const i128 hi = a + static_cast<i128>(region.x) * region.q;
    if (lo < -lim || hi > lim) {
      throw InvalidInput("progression values a + n q must stay within 2^20");
    }
  }
  if (region.q > 1) {
    const uint64_t g = std::gcd(std::gcd(static_cast<uint64_t>(std::llabs(region.a1)),
                                         static_cast<uint64_t>(std::llabs(region.a2))),
                                region.q);
    if (g != 1) throw InvalidInput("need gcd(a1, a2, q) = 1");
  }
}

int64_t SieveGrid::m1(uint64_t n1) const {
  return region_.a1 + static_cast<int64_t>(n1 * region_.q);
}

int64_t SieveGrid::m2(uint64_t n2) const {
  return region_.a2 + static_cast<int64_t>(n2 * region_.q);
}

i128 SieveGrid::value(uint64_t n1, uint64_t n2) const {
  return evaluate(form_, m1(n1), m2(n2));
}

u128 value_bound(const BinaryCubicForm& form, const SieveRegion& region) {
  validate(region);
  u128 mx = 0;
  for (int64_t a : {region.a1, region.a2}) {
    for (uint64_t n : {uint64_t{1}, region.x}) {
      mx = std::max(mx, abs_u128(a + static_cast<i128>(n) * region.q));
    }
  }
  u128 coef = 0;
  for (int64_t c : form.coefficients()) coef += abs_u128(c);
  return coef * mx * mx * mx;
}

uint64_t resolve_bound(const BinaryCubicForm& form, const SieveRegion& region,
                       uint64_t requested) {
  if (requested > kMaxBound) throw CapacityError("sieve bound is capped at 10^6");
  if (requested != 0) return std::max<uint64_t>(requested, 2);
  const u128 root = isqrt(value_bound(form, region)) + 1;
  return static_cast<uint64_t>(std::min<u128>(root, kMaxBound));
}

SieveGrid GridAccess::run_rows(const BinaryCubicForm& form, const SieveRegion& region,
                               const SieveOptions& options, const Plan& plan,
                               uint64_t row_begin, uint64_t row_end) {
  SieveGrid grid;
  grid.form_ = form;
  grid.region_ = region;
  grid.bound_ = plan.bound;
  grid.row_begin_ = row_begin;
  grid.row_end_ = row_end;
  const uint64_t rows = row_end - row_begin;
  grid.cells_.resize(rows * region.x);
  Cell* cells = grid.cells_.data();
  const unsigned threads = resolve_threads(options.threads);
  const std::size_t strips = std::min<uint64_t>(
      options.strips == 0 ? threads : options.strips, std::max<uint64_t>(rows, 1));
  // Strips are disjoint row ranges; each one is processed start to finish by
  // a single worker, so the cells do not depend on the strip count.
  parallel_blocks(strips, threads, [&](std::size_t s_begin, std::size_t s_end) {
    for (std::size_t s = s_begin; s < s_end; ++s) {
      const uint64_t lo = row_begin + rows * s / strips;
      const uint64_t hi = row_begin + rows * (s + 1) / strips;
      for (uint64_t r = lo; r < hi; r += kRowBlock) {
        const uint64_t n = std::min(kRowBlock, hi - r);
        init_rows(form, region, cells, r, n, row_begin);
        sieve_block(plan, region, cells, r, n, row_begin);
      }
    }
  });
  return grid;
}

SieveGrid sieve_rows(const BinaryCubicForm& form, const SieveRegion& region,
                     const SieveOptions& options, uint64_t row_begin, uint64_t row_end) {
  validate(region);
  if (row_begin > row_end || row_end > region.x) throw InvalidInput("row range out of bounds");
  if ((row_end - row_begin) > kDenseMaxX * kDenseMaxX / region.x) {
    throw CapacityError("band exceeds the dense cell cap");
  }
  if (options.kmax == 0) throw InvalidInput("kmax must be >= 1");
  const uint64_t bound = resolve_bound(form, region, options.bound);
  const Plan plan = build_plan(form, region, bound, options.kmax, options.threads);
  return GridAccess::run_rows(form, region, options, plan, row_begin, row_end);
}

SieveGrid sieve(const BinaryCubicForm& form, const SieveRegion& region,
                const SieveOptions& options) {
  validate(region);
  if (region.x > kDenseMaxX) {
    throw CapacityError("dense sieve limited to x <= 8192; use for_each_band");
  }
  return sieve_rows(form, region, options, 0, region.x);
}

void for_each_band(const BinaryCubicForm& form, const SieveRegion& region,
                   const SieveOptions& options, uint64_t rows_per_band,
                   const std::function<void(const SieveGrid&)>& visit) {
  validate(region);
  if (rows_per_band == 0) throw InvalidInput("rows_per_band must be >= 1");
  if (rows_per_band > kDenseMaxX * kDenseMaxX / region.x) {
    throw CapacityError("band exceeds the dense cell cap");
  }
  if (options.kmax == 0) throw InvalidInput("kmax must be >= 1");
  const uint64_t bound = resolve_bound(form, region, options.bound);
  const Plan plan = build_plan(form, region, bound, options.kmax, options.threads);
  for (uint64_t r = 0; r < region.x; r += rows_per_band) {
    visit(GridAccess::run_rows(form, region, options, plan, r, std::min(region.x, r + rows_per_band)));
  }
}

CellFactors complete(const Cell& cell, uint64_t bound) {
  CellFactors f;
  if (cell.cofactor == 0) {
    f.zero = true;
    return f;
  }
  f.largest = cell.largest;
  f.omega = cell.omega;
  f.Omega = cell.Omega;
  f.tau = cell.tau;
  f.max_exponent = cell.max_exponent;
  if (cell.cofactor == 1) return f;
  if (cell.cofactor < static_cast<u128>(bound) * bound) {
    f.largest = cell.cofactor;
    ++f.omega;
    ++f.Omega;
    f.tau *= 2;
    f.max_exponent = std::max(f.max_exponent, 1u);
    return f;
  }
  const auto factored = arith::factor(cell.cofactor);
  for (const auto& pp : factored.factors()) {
    f.largest = std::max(f.largest, pp.prime);
    ++f.omega;
    f.Omega += pp.exponent;
    f.tau *= pp.exponent + 1;
    f.max_exponent = std::max(f.max_exponent, pp.exponent);
  }
  return f;
}

bool coprime(int64_t m1, int64_t m2) {
  return std::gcd(static_cast<uint64_t>(std::llabs(m1)), static_cast<uint64_t>(std::llabs(m2))) ==
         1;
}

}  // namespace cubeval::grid
