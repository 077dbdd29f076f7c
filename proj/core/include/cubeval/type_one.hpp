#pragma once

#include <cstdint>
#include <vector>

#include "cubeval/forms.hpp"
#include "cubeval/int128.hpp"

namespace cubeval::typeone {

inline constexpr uint64_t kMaxModulus = 1'000'000;
inline constexpr uint64_t kMaxD = 100'000;

// N(x, d) = #{1 <= n1, n2 <= x : d | F(n1, n2)}, counted over the gamma_F(d)
// residue pairs modulo d. d <= 10^6.
uint64_t count_divisible(const BinaryCubicForm& form, uint64_t x, uint64_t d);

// Direct enumeration of the x^2 lattice points.
uint64_t count_divisible_bruteforce(const BinaryCubicForm& form, uint64_t x, uint64_t d);

struct Row {
  uint64_t d;
  uint64_t count;  // N(x, d)
  u128 gamma;
  double remainder;  // N(x, d) - gamma x^2 / d^2
};

struct TypeIReport {
  uint64_t x = 0;
  uint64_t D = 0;
  std::vector<Row> rows;
  double sum_abs_r = 0;
  double ratio_sqrt = 0;      // sum / (x sqrt D)
  double ratio_linear = 0;    // sum / D
  double ratio_combined = 0;  // sum / (x sqrt D + D)
};

// Rows d = 1 .. D. D <= 10^5.
TypeIReport type_one_aggregate(const BinaryCubicForm& form, uint64_t x, uint64_t D,
                               unsigned threads = 0);

}  // namespace cubeval::typeone
