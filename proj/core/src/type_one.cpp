#include "cubeval/type_one.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/parallel.hpp"

namespace cubeval::typeone {
namespace {

struct PairCache {
  const BinaryCubicForm& form;
  std::mutex mutex;
  std::map<std::pair<uint64_t, unsigned>, std::shared_ptr<const std::vector<local::ResiduePair>>>
      memo;

  std::shared_ptr<const std::vector<local::ResiduePair>> get(uint64_t p, unsigned k) {
    {
      std::lock_guard lock(mutex);
      auto it = memo.find({p, k});
      if (it != memo.end()) return it->second;
    }
    auto pairs = std::make_shared<const std::vector<local::ResiduePair>>(
        local::solution_pairs(form, p, k));
    std::lock_guard lock(mutex);
    return memo.emplace(std::make_pair(p, k), pairs).first->second;
  }
};

// #{1 <= n <= x : n == r (mod d)} with r in [0, d).
inline uint64_t class_size(uint64_t r, uint64_t d, uint64_t full,
                           uint64_t rest) {
  const uint64_t rr = r == 0 ? d : r;
  return full + (rr <= rest ? 1 : 0);
}

uint64_t count_with(PairCache& cache, uint64_t x, uint64_t d) {
  if (d == 0) throw InvalidInput("d must be >= 1");
  if (d > kMaxModulus) throw CapacityError("count_divisible: d is capped at 10^6");
  if (d == 1) return x * x;
  struct Part {
    uint64_t modulus;
    uint64_t coeff;  // CRT idempotent modulo d
    std::shared_ptr<const std::vector<local::ResiduePair>> pairs;
  };
  std::vector<Part> parts;
  const auto factored = arith::factor(d);
  for (const auto& pp : factored.factors()) {
    const auto p = static_cast<uint64_t>(pp.prime);
    uint64_t pk = 1;
    for (unsigned i = 0; i < pp.exponent; ++i) pk *= p;
    const uint64_t co = d / pk;
    const uint64_t coeff = arith::mulmod(co, arith::invmod(co % pk, pk), d);
    parts.push_back({pk, coeff, cache.get(p, pp.exponent)});
  }
  const uint64_t full = x / d, rest = x % d;
  uint64_t total = 0;
  // Depth-first walk over one residue pair per prime power.
  std::vector<std::size_t> idx(parts.size(), 0);
  std::vector<uint64_t> acc1(parts.size() + 1, 0), acc2(parts.size() + 1, 0);
  std::size_t level = 0;
  while (true) {
    if (level == parts.size()) {
      total += class_size(acc1[level], d, full, rest) *
               class_size(acc2[level], d, full, rest);
      if (level == 0) break;
      --level;
      ++idx[level];
      continue;
    }
    const auto& part = parts[level];
    if (idx[level] == part.pairs->size()) {
      idx[level] = 0;
      if (level == 0) break;
      --level;
      ++idx[level];
      continue;
    }
    const auto& [r1, r2] = (*part.pairs)[idx[level]];
    acc1[level + 1] = (acc1[level] + arith::mulmod(r1, part.coeff, d)) % d;
    acc2[level + 1] = (acc2[level] + arith::mulmod(r2, part.coeff, d)) % d;
    ++level;
  }
  return total;
}

}  // namespace

uint64_t count_divisible(const BinaryCubicForm& form, uint64_t x, uint64_t d) {
  PairCache cache{form, {}, {}};
  return count_with(cache, x, d);
}

uint64_t count_divisible_bruteforce(const BinaryCubicForm& form, uint64_t x, uint64_t d) {
  if (d == 0) throw InvalidInput("d must be >= 1");
  if (x > static_cast<uint64_t>(BinaryCubicForm::kMaxArgument)) {
    throw InvalidInput("x must be <= 2^20");
  }
  uint64_t count = 0;
  for (uint64_t n1 = 1; n1 <= x; ++n1) {
    for (uint64_t n2 = 1; n2 <= x; ++n2) {
      const i128 v = evaluate(form, static_cast<int64_t>(n1), static_cast<int64_t>(n2));
      if (v % static_cast<i128>(d) == 0) ++count;
    }
  }
  return count;
}

TypeIReport type_one_aggregate(const BinaryCubicForm& form, uint64_t x, uint64_t D,
                               unsigned threads) {
  if (x == 0 || x > static_cast<uint64_t>(BinaryCubicForm::kMaxArgument)) {
    throw InvalidInput("x must lie in [1, 2^20]");
  }
  if (D == 0) throw InvalidInput("D must be >= 1");
  if (D > kMaxD) throw CapacityError("type_one_aggregate: D is capped at 10^5");
  TypeIReport rep;
  rep.x = x;
  rep.D = D;
  rep.rows.resize(D);
  PairCache cache{form, {}, {}};
  const double x2 = static_cast<double>(x) * static_cast<double>(x);
  parallel_blocks(D, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const uint64_t d = i + 1;
      Row row{d, count_with(cache, x, d), local::gamma_F(form, d).gamma, 0.0};
      const double dd = static_cast<double>(d);
      row.remainder = static_cast<double>(row.count) -
                      static_cast<double>(row.gamma) * x2 / (dd * dd);
      rep.rows[i] = row;
    }
  });
  for (const auto& row : rep.rows) rep.sum_abs_r += std::abs(row.remainder);
  const double root = static_cast<double>(x) * std::sqrt(static_cast<double>(D));
  rep.ratio_sqrt = rep.sum_abs_r / root;
  rep.ratio_linear = rep.sum_abs_r / static_cast<double>(D);
  rep.ratio_combined = rep.sum_abs_r / (root + static_cast<double>(D));
  return rep;
}

}  // namespace cubeval::typeone
