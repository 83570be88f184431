#pragma once

#include <functional>

namespace hslg::quad {

/// Adaptive 15-point Gauss-Kronrod on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-11);

/// Integral over [a, inf) of an integrand that decays away from a single
/// peak: the range is cut once the integrand drops below `cutoff` times the
/// peak value, then integrated piecewise. The integrand must decay
/// monotonically past the peak.
double integrate_to_infinity(const std::function<double(double)>& f, double a, double peak_hint, double scale,
                             double cutoff = 1e-16, double tol = 1e-11);

}  // namespace hslg::quad
