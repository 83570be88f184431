#include "hslg/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hslg/errors.hpp"

namespace hslg::quad {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  HSLG_REQUIRE(std::isfinite(a) && std::isfinite(b), DomainError, "integrate: finite bounds required");
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, tol, &error);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double peak_hint, double scale,
                             double cutoff, double tol) {
  HSLG_REQUIRE(scale > 0.0, DomainError, "integrate_to_infinity: scale must be positive");
  const double peak_x = std::max(a, peak_hint);
  const double peak = std::abs(f(peak_x));
  if (peak == 0.0) return 0.0;
  double total = 0.0;
  if (peak_x > a) total += integrate(f, a, peak_x, tol);
  // panels of width 4 * scale past the peak until the integrand is negligible
  for (double lo = peak_x; std::abs(f(lo)) > cutoff * peak; lo += 4 * scale) total += integrate(f, lo, lo + 4 * scale, tol);
  return total;
}

}  // namespace hslg::quad
