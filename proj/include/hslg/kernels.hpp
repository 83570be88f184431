#pragma once

#include <span>
#include <vector>

namespace hslg::kernels {

/// (2 pi t)^{-1/2} exp(-x^2 / 2t).
double heat_kernel(double t, double x);

/// Transition density of Brownian motion on [0, inf) with Robin boundary
/// condition d/dx p(0, y) = (alpha - 1/2) p(0, y). The tail integral is done by
/// adaptive quadrature; alpha = 1/2 skips it and returns the reflected kernel.
double robin_kernel(double t, double alpha, double x, double y);

/// sqrt(2/pi) int_0^x exp(-y^2/2) dy = erf(x / sqrt 2); Psi(inf) = 1.
double psi(double x);

/// Density of a standard Brownian meander on [0,1] at time x1.
double meander_start(double x1, double y1);
/// Meander transition density from (x1, y1) to (x2, y2), 0 < x1 < x2 <= 1.
double meander_transition(double x1, double y1, double x2, double y2);

/// Joint density of the positive bridge from a at A to 0 at 0 at the times
/// A < xs[0] < ... < xs[k-1] < 0. Zero when some y is not positive.
double lambda_plus_fdd_density(double A, double a, std::span<const double> xs, std::span<const double> ys);

/// h(x, y) = y p_{-x}(y) / (-x), the harmonic function of the bridge.
double lambda_plus_h(double x, double y);
/// One-step kernel of the positive bridge from (x, y) to (x2, y2), x < x2 < 0.
double lambda_plus_step_kernel(double x, double y, double x2, double y2);

/// Distribution function tabulated on a uniform grid and linearly interpolated.
struct TabulatedCdf {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> values;  // cdf at lo + i (hi - lo) / (size - 1)

  double operator()(double y) const;
  /// Total mass before the final renormalization (should be 1).
  double raw_mass = 0.0;
};

/// CDF of the positive bridge marginal at x by quadrature of the k = 1
/// density; with diffusion D the bridge is sqrt(D) times the standard one
/// started from a / sqrt(D).
TabulatedCdf lambda_plus_marginal_cdf(double A, double a, double x, int nodes = 4001, double diffusion = 1.0);

/// Marginal at x of the soft-barrier path on [A, 0]: Brownian motion from a
/// with diffusion D and weight exp(-alpha sqrt(L) B(0) - L int exp(-sqrt(L) B)).
/// Solved by implicit Euler on the forward and backward Feynman-Kac equations
/// on a uniform y-grid with zero boundary values. Needs a sqrt(L) >= 4 so the
/// barrier is negligible during the short Gaussian start-up.
struct SoftBarrierGrid {
  double dy = 0.002;
  double dt = 2e-5;
};
TabulatedCdf soft_barrier_marginal_cdf(double L, double diffusion, double A, double a, double alpha, double x,
                                       const SoftBarrierGrid& grid = {});

/// sup_y |F(y) - G(y)| over the nodes of F.
double sup_distance(const TabulatedCdf& F, const TabulatedCdf& G);

}  // namespace hslg::kernels
