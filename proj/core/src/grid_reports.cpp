#include <algorithm>
#include <cmath>

#include "cubeval/dickman.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/grid.hpp"
#include "cubeval/parallel.hpp"

namespace cubeval::grid {
namespace {

const dickman::DickmanTable& shared_rho() {
  static const dickman::DickmanTable table = dickman::build_rho(dickman::kMaxU, 1.0 / 64);
  return table;
}

uint64_t resolve_side(const SieveGrid& grid, uint64_t side) {
  if (side == 0) side = grid.x();
  if (side > grid.x()) throw InvalidInput("side exceeds the sieved square");
  if (grid.row_begin() != 0 || grid.row_end() < side) {
    throw InvalidInput("report needs the rows [1, side] of the grid");
  }
  return side;
}

// Runs fn(n2, acc) for every row n2 in [1, side] with one accumulator per
// row, then folds the rows in order; the outcome is independent of threads.
template <class Acc, class RowFn, class Fold>
void over_rows(uint64_t side, unsigned threads, RowFn row_fn, Fold fold) {
  std::vector<Acc> rows(side);
  parallel_blocks(side, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) row_fn(r + 1, rows[r]);
  });
  for (const Acc& acc : rows) fold(acc);
}

double h_of(const density::HSpec& h, const CellFactors& f) {
  switch (h.mode) {
    case density::Mode::kOmega: return std::pow(h.z, static_cast<double>(f.omega));
    case density::Mode::kBigOmega: return std::pow(h.z, static_cast<double>(f.Omega));
    case density::Mode::kMoebius:
      return f.max_exponent > 1 ? 0.0 : (f.omega % 2 == 1 ? -1.0 : 1.0);
    case density::Mode::kLiouville: return f.Omega % 2 == 1 ? -1.0 : 1.0;
    case density::Mode::kKfree: return f.max_exponent < h.k ? 1.0 : 0.0;
  }
  return 0;
}

}  // namespace

namespace {

struct SmoothTotals {
  uint64_t count = 0, cells = 0, zero = 0;
};

// Rows of `grid` that fall inside [1, side].
std::pair<uint64_t, uint64_t> rows_within(const SieveGrid& grid, uint64_t side) {
  const uint64_t first = grid.row_begin() + 1;
  const uint64_t last = std::min(grid.row_end(), side);
  return {first, last};
}

SmoothTotals smooth_rows(const SieveGrid& grid, double y, uint64_t side, unsigned threads) {
  const bool filter = grid.region().coprime_only;
  const auto [first, last] = rows_within(grid, side);
  SmoothTotals total;
  if (last < first) return total;
  over_rows<SmoothTotals>(
      last - first + 1, threads,
      [&](uint64_t r, SmoothTotals& acc) {
        const uint64_t n2 = first + r - 1;
        const int64_t m2 = grid.m2(n2);
        for (uint64_t n1 = 1; n1 <= side; ++n1) {
          if (filter && !coprime(grid.m1(n1), m2)) continue;
          const Cell& cell = grid.at(n1, n2);
          if (cell.cofactor == 0) {
            ++acc.zero;
            continue;
          }
          ++acc.cells;
          u128 largest = cell.largest;
          if (cell.cofactor > 1) {
            // Every prime in the cofactor exceeds the bound.
            if (y < static_cast<double>(grid.bound())) continue;
            largest = complete(cell, grid.bound()).largest;
          }
          if (static_cast<double>(largest) <= y) ++acc.count;
        }
      },
      [&](const SmoothTotals& r) {
        total.count += r.count;
        total.cells += r.cells;
        total.zero += r.zero;
      });
  return total;
}

SmoothReport smooth_report(const SieveRegion& region, const SmoothTotals& t, double y,
                           uint64_t side) {
  SmoothReport rep;
  rep.side = side;
  rep.y = y;
  rep.count = t.count;
  rep.cells = t.cells;
  rep.zero_cells = t.zero;
  rep.u = side > 1 ? std::log(static_cast<double>(side)) / std::log(y) : 0.0;
  rep.tag = "thm2-corollary";
  if (3 * rep.u <= dickman::kMaxU) {
    rep.rho_3u = shared_rho()(3 * rep.u);
    double area = static_cast<double>(side) * static_cast<double>(side);
    if (region.coprime_only) area *= density::coprime_density(region.progression());
    rep.prediction = area * *rep.rho_3u;
    if (*rep.prediction > 0) rep.ratio = static_cast<double>(rep.count) / *rep.prediction;
  }
  return rep;
}

struct MeanTotals {
  double sum = 0;
  uint64_t cells = 0, zero = 0, negative = 0;
  u128 max_abs = 0;

  void add(const MeanTotals& r) {
    sum += r.sum;
    cells += r.cells;
    zero += r.zero;
    negative += r.negative;
    max_abs = std::max(max_abs, r.max_abs);
  }
};

MeanTotals mean_rows(const SieveGrid& grid, const density::HSpec& h, uint64_t side,
                     unsigned threads) {
  const bool filter = grid.region().coprime_only;
  const auto [first, last] = rows_within(grid, side);
  MeanTotals total;
  if (last < first) return total;
  over_rows<MeanTotals>(
      last - first + 1, threads,
      [&](uint64_t r, MeanTotals& acc) {
        const uint64_t n2 = first + r - 1;
        const int64_t m2 = grid.m2(n2);
        for (uint64_t n1 = 1; n1 <= side; ++n1) {
          if (filter && !coprime(grid.m1(n1), m2)) continue;
          const Cell& cell = grid.at(n1, n2);
          if (cell.cofactor == 0) {
            ++acc.zero;
            continue;
          }
          const i128 v = grid.value(n1, n2);
          if (v < 0) ++acc.negative;
          acc.max_abs = std::max(acc.max_abs, abs_u128(v));
          ++acc.cells;
          acc.sum += h_of(h, complete(cell, grid.bound()));
        }
      },
      [&](const MeanTotals& r) { total.add(r); });
  return total;
}

MeanReport mean_report(const BinaryCubicForm& form, const SieveRegion& region,
                       const density::HSpec& h, const MeanTotals& t, uint64_t side,
                       uint64_t pmax, unsigned threads) {
  MeanReport rep;
  rep.side = side;
  rep.h = h;
  rep.sum = t.sum;
  rep.cells = t.cells;
  rep.zero_cells = t.zero;
  rep.negative_cells = t.negative;
  rep.max_abs = t.max_abs;
  const double area = static_cast<double>(side) * static_cast<double>(side);
  rep.normalized = rep.sum / area;

  const bool filter = region.coprime_only;
  const auto prog = region.progression();
  if (h.mode == density::Mode::kKfree) {
    rep.tag = "greaves-kfree";
    if (!filter && prog.q != 1) return rep;  // the product describes q = 1 only
    const auto product = filter ? density::mean_constant(form, prog, h, pmax, threads)
                                : density::kfree_product(form, h.k, pmax, threads);
    rep.constant = product.value;
    rep.singular_primes = product.excluded_singular;
    rep.prediction = area * product.value;
  } else {
    rep.tag = "thm1";
    if (!filter) return rep;  // the main term covers coprime pairs
    const auto product = density::mean_constant(form, prog, h, pmax, threads);
    rep.constant = product.value;
    rep.singular_primes = product.excluded_singular;
    const double z = h.effective_z();
    const double g = dickman::recip_gamma(z);
    const double base = 3.0 * std::log(static_cast<double>(side));
    rep.prediction = area * product.value * std::pow(base, z - 1.0) * g;
    if (rep.max_abs > 1) {
      const double alt = std::log(static_cast<double>(rep.max_abs));
      rep.prediction_alt = area * product.value * std::pow(alt, z - 1.0) * g;
    }
  }
  if (rep.prediction && *rep.prediction != 0) rep.ratio = rep.sum / *rep.prediction;
  if (rep.prediction_alt && *rep.prediction_alt != 0) {
    rep.ratio_alt = rep.sum / *rep.prediction_alt;
  }
  return rep;
}

uint64_t band_rows(uint64_t x) { return std::max<uint64_t>(1, (uint64_t{1} << 24) / x); }

}  // namespace

SmoothReport smooth_count(const SieveGrid& grid, double y, uint64_t side, unsigned threads) {
  if (!(y >= 2)) throw InvalidInput("smoothness bound y must be >= 2");
  side = resolve_side(grid, side);
  return smooth_report(grid.region(), smooth_rows(grid, y, side, threads), y, side);
}

SmoothReport smooth_count_banded(const BinaryCubicForm& form, const SieveRegion& region,
                                 const SieveOptions& options, double y) {
  if (!(y >= 2)) throw InvalidInput("smoothness bound y must be >= 2");
  SmoothTotals total;
  for_each_band(form, region, options, band_rows(region.x), [&](const SieveGrid& band) {
    const auto t = smooth_rows(band, y, region.x, options.threads);
    total.count += t.count;
    total.cells += t.cells;
    total.zero += t.zero;
  });
  return smooth_report(region, total, y, region.x);
}

MeanReport mean_multiplicative(const SieveGrid& grid, const density::HSpec& h,
                               uint64_t side, uint64_t pmax, unsigned threads) {
  if (!(std::abs(h.z) <= 1.0)) throw InvalidInput("z must satisfy |z| <= 1");
  side = resolve_side(grid, side);
  return mean_report(grid.form(), grid.region(), h, mean_rows(grid, h, side, threads), side,
                     pmax, threads);
}

MeanReport mean_multiplicative_banded(const BinaryCubicForm& form, const SieveRegion& region,
                                      const SieveOptions& options, const density::HSpec& h,
                                      uint64_t pmax) {
  if (!(std::abs(h.z) <= 1.0)) throw InvalidInput("z must satisfy |z| <= 1");
  MeanTotals total;
  for_each_band(form, region, options, band_rows(region.x), [&](const SieveGrid& band) {
    total.add(mean_rows(band, h, region.x, options.threads));
  });
  return mean_report(form, region, h, total, region.x, pmax, options.threads);
}

DivisorFit fit_divisor_ladder(const std::vector<std::pair<uint64_t, double>>& ladder) {
  std::vector<std::pair<uint64_t, double>> pts;
  for (const auto& pt : ladder) {
    if (pt.first >= 2 &&
        std::none_of(pts.begin(), pts.end(), [&](const auto& q) { return q.first == pt.first; })) {
      pts.push_back(pt);
    }
  }
  if (pts.size() < 3) throw InvalidInput("ladder too short: need three distinct x' >= 2");
  // Columns scaled by x'^2 keep the normal equations well conditioned.
  double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  for (const auto& [x, S] : pts) {
    const double xd = static_cast<double>(x);
    const double w = xd * xd;
    const double A = std::log(xd), B = 1.0, target = S / w;
    s11 += A * A;
    s12 += A * B;
    s22 += B * B;
    t1 += A * target;
    t2 += B * target;
  }
  const double det = s11 * s22 - s12 * s12;
  DivisorFit fit;
  fit.c0 = (t1 * s22 - t2 * s12) / det;
  fit.c1 = (s11 * t2 - s12 * t1) / det;
  double err = 0, norm = 0;
  for (const auto& [x, S] : pts) {
    const double xd = static_cast<double>(x);
    const double model = fit.c0 * xd * xd * std::log(xd) + fit.c1 * xd * xd;
    err += (S - model) * (S - model);
    norm += S * S;
  }
  fit.residual = norm > 0 ? std::sqrt(err / norm) : 0.0;
  fit.ladder = ladder;
  return fit;
}

DivisorFit divisor_sum(const SieveGrid& grid, unsigned points, uint64_t side,
                       unsigned threads) {
  side = resolve_side(grid, side);
  if (points < 3) throw InvalidInput("ladder too short: need at least three points");
  std::vector<uint64_t> steps;
  for (unsigned k = 1; k <= points; ++k) {
    const uint64_t s = side * k / points;
    if (s >= 2 && (steps.empty() || steps.back() != s)) steps.push_back(s);
  }
  if (steps.size() < 3) throw InvalidInput("ladder too short for this side");
  const bool filter = grid.region().coprime_only;
  const std::size_t shells = steps.size();
  // shell_of[n] = first ladder index whose square contains coordinate n.
  std::vector<uint32_t> shell_of(side + 1, static_cast<uint32_t>(shells));
  for (uint64_t n = 1; n <= side; ++n) {
    shell_of[n] = static_cast<uint32_t>(
        std::lower_bound(steps.begin(), steps.end(), n) - steps.begin());
  }
  std::vector<unsigned long long> totals(shells, 0);
  over_rows<std::vector<unsigned long long>>(
      side, threads,
      [&](uint64_t n2, std::vector<unsigned long long>& acc) {
        acc.assign(shells, 0);
        const int64_t m2 = grid.m2(n2);
        for (uint64_t n1 = 1; n1 <= side; ++n1) {
          if (filter && !coprime(grid.m1(n1), m2)) continue;
          const CellFactors f = complete(grid.at(n1, n2), grid.bound());
          if (f.zero) continue;
          const std::size_t s = std::max(shell_of[n1], shell_of[n2]);
          if (s < shells) acc[s] += static_cast<unsigned long long>(f.tau);
        }
      },
      [&](const std::vector<unsigned long long>& acc) {
        for (std::size_t s = 0; s < shells; ++s) totals[s] += acc[s];
      });
  std::vector<std::pair<uint64_t, double>> ladder;
  unsigned long long running = 0;
  for (std::size_t s = 0; s < shells; ++s) {
    running += totals[s];
    ladder.emplace_back(steps[s], static_cast<double>(running));
  }
  return fit_divisor_ladder(ladder);
}

}  // namespace cubeval::grid
