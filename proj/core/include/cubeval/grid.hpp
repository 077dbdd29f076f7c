#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cubeval/densities.hpp"
#include "cubeval/forms.hpp"
#include "cubeval/int128.hpp"

namespace cubeval::grid {

inline constexpr uint64_t kDenseMaxX = uint64_t{1} << 13;
inline constexpr uint64_t kMaxBound = 1'000'000;

/// Lattice [1, x]^2 of n = (n1, n2), evaluated at m_i = a_i + n_i q.
struct SieveRegion {
  uint64_t x = 0;
  uint64_t q = 1;
  int64_t a1 = 0;
  int64_t a2 = 0;
  bool coprime_only = false;  // keep gcd(m1, m2) = 1

  density::Progression progression() const { return {q, a1, a2}; }
};

// Throws InvalidInput on x = 0, q = 0, |m_i| beyond 2^20, or gcd(a1, a2, q) > 1
// with q > 1.
void validate(const SieveRegion& region);

/// Sieved state of one value |F(m1, m2)|. Fields describe the extracted part
/// (primes <= bound); `cofactor` holds the rest. A zero value keeps cofactor 0.
struct Cell {
  u128 cofactor;
  uint64_t largest;  // largest extracted prime, 1 if none
  uint32_t tau;      // divisor count of the extracted part
  uint16_t Omega;
  uint8_t omega;
  uint8_t max_exponent;
};
static_assert(sizeof(Cell) == 32);

struct SieveOptions {
  // 0 picks isqrt(max |F|) + 1 capped at kMaxBound, so cofactors are 1 or prime.
  uint64_t bound = 0;
  unsigned kmax = 3;
  // Row strips sieved independently; 0 means one per worker.
  unsigned strips = 0;
  unsigned threads = 0;
};

/// Rows n2 in [row_begin + 1, row_end] of the sieved square, row-major.
class SieveGrid {
 public:
  const BinaryCubicForm& form() const { return form_; }
  const SieveRegion& region() const { return region_; }
  uint64_t x() const { return region_.x; }
  uint64_t bound() const { return bound_; }
  uint64_t row_begin() const { return row_begin_; }
  uint64_t row_end() const { return row_end_; }
  const std::vector<Cell>& cells() const { return cells_; }

  // 1-based lattice coordinates; n2 must lie in this band.
  const Cell& at(uint64_t n1, uint64_t n2) const {
    return cells_[(n2 - 1 - row_begin_) * region_.x + (n1 - 1)];
  }
  int64_t m1(uint64_t n1) const;
  int64_t m2(uint64_t n2) const;
  i128 value(uint64_t n1, uint64_t n2) const;

 private:
  friend struct GridAccess;

  BinaryCubicForm form_{1, 0, 0, 1};
  SieveRegion region_;
  uint64_t bound_ = 0;
  uint64_t row_begin_ = 0;
  uint64_t row_end_ = 0;
  std::vector<Cell> cells_;
};

// (|a| + |b| + |c| + |d|) M^3 with M = max |m_i|: an upper bound for |F| on
// the square.
u128 value_bound(const BinaryCubicForm& form, const SieveRegion& region);
uint64_t resolve_bound(const BinaryCubicForm& form, const SieveRegion& region,
                       uint64_t requested);

// Whole square; x <= 2^13, otherwise CapacityError.
SieveGrid sieve(const BinaryCubicForm& form, const SieveRegion& region,
                const SieveOptions& options = {});

// Rows [row_begin, row_end) of the same square (0-based). Cells agree bit for
// bit with the dense grid.
SieveGrid sieve_rows(const BinaryCubicForm& form, const SieveRegion& region,
                     const SieveOptions& options, uint64_t row_begin, uint64_t row_end);

// Sieves the square band by band and hands each band to `visit` in row order.
void for_each_band(const BinaryCubicForm& form, const SieveRegion& region,
                   const SieveOptions& options, uint64_t rows_per_band,
                   const std::function<void(const SieveGrid&)>& visit);

/// Factorization data for the full value, cofactor included.
struct CellFactors {
  bool zero = false;
  u128 largest = 1;
  unsigned omega = 0;
  unsigned Omega = 0;
  u128 tau = 1;
  unsigned max_exponent = 0;
};

// A cofactor below bound^2 is prime; anything larger goes to arith::factor.
CellFactors complete(const Cell& cell, uint64_t bound);

// gcd(|m1|, |m2|) == 1.
bool coprime(int64_t m1, int64_t m2);

// Reports over the sub-square [1, side]^2 of a dense grid (side = 0 means x).

struct SmoothReport {
  uint64_t side = 0;
  double y = 0;
  double u = 0;  // log side / log y
  uint64_t count = 0;
  uint64_t cells = 0;       // cells passing the region filter, zero values excluded
  uint64_t zero_cells = 0;  // F = 0, excluded
  std::optional<double> rho_3u;
  std::optional<double> prediction;
  std::optional<double> ratio;
  std::string tag;
};

SmoothReport smooth_count(const SieveGrid& grid, double y, uint64_t side = 0,
                          unsigned threads = 0);

// The full square of any size, sieved band by band.
SmoothReport smooth_count_banded(const BinaryCubicForm& form, const SieveRegion& region,
                                 const SieveOptions& options, double y);

struct MeanReport {
  uint64_t side = 0;
  density::HSpec h;
  double sum = 0;
  uint64_t cells = 0;
  uint64_t zero_cells = 0;
  uint64_t negative_cells = 0;
  double normalized = 0;  // sum / side^2
  u128 max_abs = 0;
  std::optional<double> constant;
  std::optional<double> prediction;      // log base 3 log side
  std::optional<double> prediction_alt;  // log base log max |F|
  std::optional<double> ratio;
  std::optional<double> ratio_alt;
  std::vector<uint64_t> singular_primes;  // local factors taken from counting
  std::string tag;
};

// Local constants use primes up to pmax.
MeanReport mean_multiplicative(const SieveGrid& grid, const density::HSpec& h,
                               uint64_t side = 0, uint64_t pmax = 10'000,
                               unsigned threads = 0);
MeanReport mean_multiplicative_banded(const BinaryCubicForm& form, const SieveRegion& region,
                                      const SieveOptions& options, const density::HSpec& h,
                                      uint64_t pmax = 10'000);

struct DivisorFit {
  double c0 = 0;
  double c1 = 0;
  double residual = 0;  // ||S - fit|| / ||S||
  std::vector<std::pair<uint64_t, double>> ladder;
};

// S(x') ~ c0 x'^2 log x' + c1 x'^2, fitted by least squares on S / x'^2 =
// c0 log x' + c1. Needs three distinct x' >= 2.
DivisorFit fit_divisor_ladder(const std::vector<std::pair<uint64_t, double>>& ladder);

// Sum of tau(|F|) over [1, x']^2 for x' = side k / points, k = 1 .. points,
// then fit_divisor_ladder.
DivisorFit divisor_sum(const SieveGrid& grid, unsigned points = 8, uint64_t side = 0,
                       unsigned threads = 0);

}  // namespace cubeval::grid
