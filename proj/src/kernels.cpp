#include "hslg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hslg/errors.hpp"
#include "hslg/quadrature.hpp"

namespace hslg::kernels {

double heat_kernel(double t, double x) {
  HSLG_REQUIRE(t > 0.0, DomainError, "heat_kernel: t must be positive");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double robin_kernel(double t, double alpha, double x, double y) {
  HSLG_REQUIRE(t > 0.0, DomainError, "robin_kernel: t must be positive");
  const double base = heat_kernel(t, x + y) + heat_kernel(t, x - y);
  const double c = alpha - 0.5;
  if (c == 0.0) return base;
  const double s = x + y;
  auto f = [&](double z) { return heat_kernel(t, s + z) * std::exp(-c * z); };
  // the integrand's log is concave with its maximum at z = -s - c t
  const double peak = std::max(0.0, -s - c * t);
  const double tail = quad::integrate_to_infinity(f, 0.0, peak, std::sqrt(t), 1e-16, 1e-13);
  return base - 2.0 * c * tail;
}

double psi(double x) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  return std::erf(x / std::numbers::sqrt2);
}

namespace {

double psi_at(double x, double y) { return x >= 1.0 ? 1.0 : psi(y / std::sqrt(1.0 - x)); }

double killed_kernel(double dt, double y1, double y2) { return heat_kernel(dt, y2 - y1) - heat_kernel(dt, y2 + y1); }

}  // namespace

double meander_start(double x1, double y1) {
  HSLG_REQUIRE(x1 > 0.0 && x1 <= 1.0, DomainError, "meander_start: need 0 < x1 <= 1");
  HSLG_REQUIRE(y1 > 0.0, DomainError, "meander_start: need y1 > 0");
  return std::sqrt(2.0 * std::numbers::pi) * (y1 / x1) * heat_kernel(x1, y1) * psi_at(x1, y1);
}

double meander_transition(double x1, double y1, double x2, double y2) {
  HSLG_REQUIRE(x1 > 0.0 && x1 < x2 && x2 <= 1.0, DomainError, "meander_transition: need 0 < x1 < x2 <= 1");
  HSLG_REQUIRE(y1 > 0.0 && y2 > 0.0, DomainError, "meander_transition: need positive y1, y2");
  return killed_kernel(x2 - x1, y1, y2) * psi_at(x2, y2) / psi_at(x1, y1);
}

double lambda_plus_fdd_density(double A, double a, std::span<const double> xs, std::span<const double> ys) {
  HSLG_REQUIRE(xs.size() == ys.size() && !xs.empty(), ContractError, "lambda_plus_fdd_density: size mismatch");
  HSLG_REQUIRE(a > 0.0, DomainError, "lambda_plus_fdd_density: need a > 0");
  double prev_x = A;
  for (double x : xs) {
    HSLG_REQUIRE(x > prev_x && x < 0.0, DomainError, "lambda_plus_fdd_density: need A < x_1 < ... < x_k < 0");
    prev_x = x;
  }
  for (double y : ys)
    if (!(y > 0.0)) return 0.0;
  const double xk = xs.back(), yk = ys.back();
  double out = (A / xk) * (yk / a) * heat_kernel(-xk, yk) / heat_kernel(-A, a);
  double x0 = A, y0 = a;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out *= killed_kernel(xs[i] - x0, y0, ys[i]);
    x0 = xs[i];
    y0 = ys[i];
  }
  return out;
}

double lambda_plus_h(double x, double y) {
  HSLG_REQUIRE(x < 0.0, DomainError, "lambda_plus_h: need x < 0");
  return y * heat_kernel(-x, y) / (-x);
}

double lambda_plus_step_kernel(double x, double y, double x2, double y2) {
  HSLG_REQUIRE(x < x2 && x2 < 0.0, DomainError, "lambda_plus_step_kernel: need x < x2 < 0");
  HSLG_REQUIRE(y > 0.0, DomainError, "lambda_plus_step_kernel: need y > 0");
  if (!(y2 > 0.0)) return 0.0;
  return killed_kernel(x2 - x, y, y2) * lambda_plus_h(x2, y2) / lambda_plus_h(x, y);
}

double TabulatedCdf::operator()(double y) const {
  if (y <= lo) return 0.0;
  if (y >= hi) return 1.0;
  const double pos = (y - lo) / (hi - lo) * static_cast<double>(values.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), values.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

TabulatedCdf lambda_plus_marginal_cdf(double A, double a, double x, int nodes, double diffusion) {
  HSLG_REQUIRE(A < x && x < 0.0, DomainError, "lambda_plus_marginal_cdf: need A < x < 0");
  HSLG_REQUIRE(nodes >= 3, DomainError, "lambda_plus_marginal_cdf: need at least 3 nodes");
  HSLG_REQUIRE(diffusion > 0.0, DomainError, "lambda_plus_marginal_cdf: need D > 0");
  if (diffusion != 1.0) {
    auto out = lambda_plus_marginal_cdf(A, a / std::sqrt(diffusion), x, nodes);
    out.hi *= std::sqrt(diffusion);
    return out;
  }
  const double mean = a * x / A;
  const double sd = std::sqrt((x - A) * x / A);
  TabulatedCdf out;
  out.lo = 0.0;
  out.hi = mean + 14.0 * sd;
  out.values.assign(static_cast<std::size_t>(nodes), 0.0);
  const double xs[1] = {x};
  auto density = [&](double y) {
    const double ys[1] = {y};
    return lambda_plus_fdd_density(A, a, xs, ys);
  };
  const double h = out.hi / (nodes - 1);
  // Simpson's rule per panel; the density is smooth and the panels are narrow
  for (int i = 1; i < nodes; ++i) {
    const double left = (i - 1) * h;
    out.values[i] = out.values[i - 1] + h / 6.0 * (density(left) + 4.0 * density(left + 0.5 * h) + density(left + h));
  }
  out.raw_mass = out.values.back();
  for (double& v : out.values) v /= out.raw_mass;
  return out;
}

namespace {

// Implicit Euler steps for u_t = (D/2) u_yy - V(y) u, zero outside the grid.
class ImplicitEuler {
 public:
  ImplicitEuler(const std::vector<double>& potential, double diffusion, double dy, double dt)
      : off_(-dt * diffusion / (2.0 * dy * dy)), c_(potential.size()), inv_(potential.size()) {
    const std::size_t n = potential.size();
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diag = 1.0 + dt * (diffusion / (dy * dy) + potential[i]);
      inv_[i] = 1.0 / (diag - off_ * prev_c);
      c_[i] = off_ * inv_[i];
      prev_c = c_[i];
    }
  }

  void step(std::vector<double>& u) const {
    const std::size_t n = u.size();
    u[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) u[i] = (u[i] - off_ * u[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) u[i] -= c_[i] * u[i + 1];
  }

 private:
  double off_;
  std::vector<double> c_, inv_;
};

}  // namespace

TabulatedCdf soft_barrier_marginal_cdf(double L, double diffusion, double A, double a, double alpha, double x,
                                       const SoftBarrierGrid& grid) {
  HSLG_REQUIRE(L > 0.0 && diffusion > 0.0, DomainError, "soft_barrier_marginal_cdf: need L > 0 and D > 0");
  HSLG_REQUIRE(A < x && x < 0.0, DomainError, "soft_barrier_marginal_cdf: need A < x < 0");
  const double sqrtL = std::sqrt(L);
  HSLG_REQUIRE(a * sqrtL >= 4.0, DomainError, "soft_barrier_marginal_cdf: need a sqrt(L) >= 4");
  const double t0 = std::min(0.002, 0.1 * (x - A));
  const double lo = -8.0 / sqrtL - 0.1;
  const double hi = a + 8.0 * std::sqrt(diffusion * -A) + 1.0;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / grid.dy)) + 1;
  std::vector<double> ys(n), potential(n), forward(n), backward(n);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = lo + static_cast<double>(i) * grid.dy;
    potential[i] = L * std::exp(-sqrtL * ys[i]);
    forward[i] = heat_kernel(diffusion * t0, ys[i] - a);
    backward[i] = std::exp(-alpha * sqrtL * ys[i]);
  }
  const ImplicitEuler stepper(potential, diffusion, grid.dy, grid.dt);
  const auto forward_steps = static_cast<long>(std::lround((x - A - t0) / grid.dt));
  const auto backward_steps = static_cast<long>(std::lround(-x / grid.dt));
  for (long s = 0; s < forward_steps; ++s) stepper.step(forward);
  for (long s = 0; s < backward_steps; ++s) stepper.step(backward);

  TabulatedCdf out;
  out.lo = lo;
  out.hi = ys.back();
  out.values.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    out.values[i] = out.values[i - 1] + 0.5 * grid.dy * (forward[i - 1] * backward[i - 1] + forward[i] * backward[i]);
  out.raw_mass = out.values.back();
  HSLG_REQUIRE(out.raw_mass > 0.0 && std::isfinite(out.raw_mass), DomainError,
               "soft_barrier_marginal_cdf: degenerate solution");
  for (double& v : out.values) v /= out.raw_mass;
  return out;
}

double sup_distance(const TabulatedCdf& F, const TabulatedCdf& G) {
  double out = 0.0;
  const double n = static_cast<double>(F.values.size() - 1);
  for (std::size_t i = 0; i < F.values.size(); ++i)
    out = std::max(out, std::abs(F.values[i] - G(F.lo + (F.hi - F.lo) * static_cast<double>(i) / n)));
  return out;
}

}  // namespace hslg::kernels
