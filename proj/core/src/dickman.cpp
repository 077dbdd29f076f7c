#include "cubeval/dickman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"

namespace cubeval::dickman {
namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

constexpr int kStencil = 8;

// Lagrange interpolation through values[first .. first+7] at spacing h.
double lagrange(const std::vector<double>& values, uint64_t first, double h, double u) {
  const double s = u / h - static_cast<double>(first);
  double total = 0;
  for (int i = 0; i < kStencil; ++i) {
    double w = 1;
    for (int j = 0; j < kStencil; ++j) {
      if (j != i) w *= (s - j) / (i - j);
    }
    total += w * values[first + i];
  }
  return total;
}

// Evaluates rho from the nodes already present in `values`. `unit` selects
// the interval [unit, unit+1] whose nodes form the stencil.
double interpolate(const std::vector<double>& values, uint64_t per_unit, double h,
                   double u, uint64_t unit) {
  if (u <= 1.0) return 1.0;
  const uint64_t lo = unit * per_unit, hi = (unit + 1) * per_unit;
  const auto near = static_cast<uint64_t>(std::floor(u / h));
  uint64_t first = near >= 3 ? near - 3 : 0;
  first = std::clamp<uint64_t>(first, lo, hi - (kStencil - 1));
  return lagrange(values, first, h, u);
}

uint64_t unit_of(double u) {
  return static_cast<uint64_t>(std::floor(u));
}

}  // namespace

DickmanTable build_rho(double umax, double step) {
  if (!(umax > 0) || umax > kMaxU) throw InvalidInput("umax must lie in (0, 20]");
  if (!(step > 0) || step > kMaxStep) throw InvalidInput("step must be at most 1/64");
  const double inv = 1.0 / step;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * rounded) {
    throw InvalidInput("step must be 1/N for an integer N");
  }
  DickmanTable t;
  t.per_unit_ = static_cast<uint64_t>(rounded);
  t.step_ = 1.0 / static_cast<double>(t.per_unit_);
  t.umax_ = umax;
  const uint64_t units = static_cast<uint64_t>(std::ceil(umax - 1e-12));
  const uint64_t n = units * t.per_unit_ + 1;
  const double h = t.step_;
  t.values_.assign(n, 1.0);
  for (uint64_t i = t.per_unit_; i + 1 < n; ++i) {
    const double u0 = static_cast<double>(i) * h;
    // rho(t - 1) for t in [u0, u0 + h] lives in the unit interval below.
    const uint64_t below = i / t.per_unit_ - 1;
    double integral = 0;
    for (int g = 0; g < 8; ++g) {
      const double tt = u0 + 0.5 * h * (1.0 + kNodes[g]);
      integral += kWeights[g] *
                  interpolate(t.values_, t.per_unit_, h, tt - 1.0, below) / tt;
    }
    t.values_[i + 1] = t.values_[i] - 0.5 * h * integral;
  }
  return t;
}

double DickmanTable::operator()(double u) const {
  if (u < 0) return 0.0;
  if (u <= 1.0) return 1.0;
  if (u > umax_ + 1e-12) throw RangeError("rho: u exceeds the table range");
  const uint64_t units = (values_.size() - 1) / per_unit_;
  const uint64_t unit = std::min(unit_of(u), units - 1);
  return interpolate(values_, per_unit_, step_, u, unit);
}

double rho(const DickmanTable& table, double u) { return table(u); }

double delay_residual(const DickmanTable& table) {
  const double h = table.step();
  const auto& v = table.values();
  const auto per_unit = static_cast<uint64_t>(std::llround(1.0 / h));
  const uint64_t units = (v.size() - 1) / per_unit;
  // Cell integrals over [j h, (j+1) h], each taken inside its own unit interval.
  std::vector<double> cell(v.size() - 1);
  for (uint64_t j = 0; j + 1 < v.size(); ++j) {
    const uint64_t unit = std::min(j / per_unit, units - 1);
    double s = 0;
    for (int g = 0; g < 8; ++g) {
      const double tt = (static_cast<double>(j) + 0.5 * (1.0 + kNodes[g])) * h;
      s += kWeights[g] * interpolate(v, per_unit, h, tt, unit);
    }
    cell[j] = 0.5 * h * s;
  }
  double worst = 0;
  double window = 0;
  for (uint64_t j = 0; j < per_unit; ++j) window += cell[j];
  for (uint64_t i = per_unit; i < v.size(); ++i) {
    const double u = static_cast<double>(i) * h;
    if (u > table.umax() + 1e-12) break;
    worst = std::max(worst, std::abs(u * v[i] - window));
    if (i < cell.size()) window += cell[i] - cell[i - per_unit];
  }
  return worst;
}

double recip_gamma(double z) {
  if (z <= 0 && z == std::floor(z)) return 0.0;
  return 1.0 / std::tgamma(z);
}

double zeta_q_2(uint64_t q) {
  if (q == 0 || q > 1'000'000) throw InvalidInput("zeta_q_2: q must lie in [1, 10^6]");
  double value = std::numbers::pi * std::numbers::pi / 6.0;
  const auto factored = arith::factor(q);
  for (const auto& pp : factored.factors()) {
    const double p = static_cast<double>(pp.prime);
    value *= 1.0 - 1.0 / (p * p);
  }
  return value;
}

}  // namespace cubeval::dickman
