#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "hslg/errors.hpp"
#include "hslg/kernels.hpp"

using namespace hslg;
using namespace hslg::kernels;

namespace {

double gauss(double t, double x) { return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t); }
double upper_tail(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

// Composite Simpson on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("heat kernel") {
  CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(heat_kernel(0.5, 1.2) == doctest::Approx(gauss(0.5, 1.2)).epsilon(1e-14));
  CHECK(simpson([](double x) { return heat_kernel(0.7, x); }, -12.0, 12.0, 2000) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Robin kernel against its closed form") {
  // int_0^inf p_t(s + z) e^{-cz} dz = e^{cs + c^2 t / 2} Q((s + c t) / sqrt t)
  for (double alpha : {0.1, 0.5, 0.9, 1.5, 3.0})
    for (double t : {0.2, 1.0, 2.0})
      for (double x : {0.0, 0.4, 1.5})
        for (double y : {0.0, 0.3, 2.0}) {
          const double c = alpha - 0.5, s = x + y;
          const double expect = gauss(t, x - y) + gauss(t, x + y) -
                                2.0 * c * std::exp(c * s + 0.5 * c * c * t) * upper_tail((s + c * t) / std::sqrt(t));
          CHECK(std::abs(robin_kernel(t, alpha, x, y) - expect) < 1e-12);
        }
  CHECK_THROWS_AS(robin_kernel(0.0, 1.0, 0.1, 0.1), DomainError);
}

TEST_CASE("Robin kernel at alpha one half is the reflected kernel, bit for bit") {
  for (double t : {0.1, 1.0})
    for (double x : {0.0, 0.7})
      for (double y : {0.0, 1.3}) CHECK(robin_kernel(t, 0.5, x, y) == heat_kernel(t, x + y) + heat_kernel(t, x - y));
}

TEST_CASE("psi") {
  CHECK(psi(0.0) == 0.0);
  CHECK(psi(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(psi(1.0) == doctest::Approx(0.682689492137).epsilon(1e-11));
}

TEST_CASE("meander densities integrate to one") {
  for (double x1 : {0.2, 0.5, 1.0}) {
    const double mass = simpson([&](double y) { return y > 0 ? meander_start(x1, y) : 0.0; }, 0.0, 10.0, 4000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
  const double mass = simpson([](double y) { return y > 0 ? meander_transition(0.3, 0.8, 0.7, y) : 0.0; }, 0.0, 10.0, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(meander_start(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(meander_transition(0.5, 1.0, 0.4, 1.0), DomainError);
}

TEST_CASE("positive bridge one-time density") {
  const double A = -1.0, a = 1.0;
  for (double x : {-0.8, -0.5, -0.1})
    for (double y : {0.05, 0.5, 1.7}) {
      // (A/x)(y/a) p_{-x}(y) / p_{-A}(a) * (p_{x-A}(y-a) - p_{x-A}(y+a))
      const double expect = (A / x) * (y / a) * gauss(-x, y) / gauss(-A, a) * (gauss(x - A, y - a) - gauss(x - A, y + a));
      const double xs[1] = {x}, ys[1] = {y};
      CHECK(lambda_plus_fdd_density(A, a, xs, ys) == doctest::Approx(expect).epsilon(1e-12));
    }
  const double xs[2] = {-0.5, -0.7}, ys[2] = {1.0, 1.0};
  CHECK_THROWS_AS(lambda_plus_fdd_density(A, a, xs, ys), DomainError);
  const double xs2[2] = {-0.7, -0.5}, ys2[2] = {1.0, -0.1};
  CHECK(lambda_plus_fdd_density(A, a, xs2, ys2) == 0.0);
}

TEST_CASE("positive bridge step kernel integrates to one") {
  const double mass = simpson([](double y) { return lambda_plus_step_kernel(-0.6, 0.4, -0.3, y); }, 0.0, 8.0, 4000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lambda_plus_step_kernel(-0.6, 0.4, -0.3, -0.2) == 0.0);
}

TEST_CASE("tabulated marginal cdf") {
  const auto F = lambda_plus_marginal_cdf(-1.0, 1.0, -0.5);
  CHECK(F.raw_mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(F(-1.0) == 0.0);
  CHECK(F(1e6) == 1.0);
  for (std::size_t i = 1; i < F.values.size(); ++i) CHECK(F.values[i] >= F.values[i - 1]);
  CHECK(sup_distance(F, F) < 1e-15);
  // diffusion 2 is sqrt(2) times the standard bridge started from a / sqrt(2)
  const auto G = lambda_plus_marginal_cdf(-1.0, 1.0, -0.5, 4001, 2.0);
  const auto H = lambda_plus_marginal_cdf(-1.0, 1.0 / std::sqrt(2.0), -0.5);
  for (double y : {0.1, 0.5, 1.0, 2.0}) CHECK(G(y) == doctest::Approx(H(y / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("finite-L soft barrier marginal approaches the positive bridge") {
  const auto limit = lambda_plus_marginal_cdf(-1.0, 1.0, -0.5);
  const double d25 = sup_distance(soft_barrier_marginal_cdf(25.0, 1.0, -1.0, 1.0, 1.0, -0.5), limit);
  const double d100 = sup_distance(soft_barrier_marginal_cdf(100.0, 1.0, -1.0, 1.0, 1.0, -0.5), limit);
  CHECK(d100 < d25);
  CHECK(d100 < 0.15);
  CHECK_THROWS_AS(soft_barrier_marginal_cdf(4.0, 1.0, -1.0, 1.0, 1.0, -0.5), DomainError);
}
