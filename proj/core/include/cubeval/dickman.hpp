#pragma once

#include <cstdint>
#include <vector>

namespace cubeval::dickman {

inline constexpr double kMaxU = 20.0;
inline constexpr double kMaxStep = 1.0 / 64.0;

/// rho on a uniform grid over [0, U]. Immutable after build.
///
/// rho(t - 1) inside each integration step comes from a degree-7 Lagrange
/// interpolant on eight nodes of a single unit interval [k, k+1], where rho
/// is analytic. Evaluation between nodes uses the same interpolant.
class DickmanTable {
 public:
  double step() const { return step_; }
  double umax() const { return umax_; }
  // Gauss-Legendre points per grid step.
  unsigned order() const { return 8; }
  const std::vector<double>& values() const { return values_; }

  double operator()(double u) const;

 private:
  friend DickmanTable build_rho(double umax, double step);

  double step_ = 0;
  double umax_ = 0;
  uint64_t per_unit_ = 0;       // nodes per unit interval, 1/step
  std::vector<double> values_;  // rho(i * step), covering [0, ceil(umax)]
};

// step must be 1/N for an integer N >= 64; umax in (0, 20]. Throws
// InvalidInput otherwise.
DickmanTable build_rho(double umax, double step);

// Interpolated rho(u); 0 for u < 0. Throws RangeError for u > umax.
double rho(const DickmanTable& table, double u);

// max over grid points u in [1, umax] of |u rho(u) - int_{u-1}^{u} rho(t) dt|.
double delay_residual(const DickmanTable& table);

// 1/Gamma(z) for z in [-2, 4], exactly 0 at z = 0, -1, -2.
double recip_gamma(double z);

// zeta(2) prod_{p | q} (1 - p^-2). Throws InvalidInput for q = 0 or q > 10^6.
double zeta_q_2(uint64_t q);

}  // namespace cubeval::dickman
