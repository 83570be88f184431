#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hslg/errors.hpp"
#include "hslg/rng.hpp"
#include "hslg/stats.hpp"

using namespace hslg;
using namespace hslg::stats;

TEST_CASE("log_sum_exp") {
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(log_sum_exp(zeros) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<double> one{-3.25};
  CHECK(log_sum_exp(one) == -3.25);
  const std::vector<double> far{-1000.0, -1001.0};
  CHECK(std::abs(log_sum_exp(far) - (-1000.0 + std::log1p(std::exp(-1.0)))) < 1e-12);
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> none{-inf, -inf};
  CHECK(log_sum_exp(none) == -inf);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), DomainError);

  const std::vector<double> v{0.3, -2.0, 5.5, -inf, 1.25};
  const std::vector<double> permuted{1.25, -inf, 5.5, 0.3, -2.0};
  CHECK(std::abs(log_sum_exp(v) - log_sum_exp(permuted)) < 1e-12);
  std::vector<double> shifted = v;
  for (double& x : shifted) x += 123.0;
  CHECK(std::abs(log_sum_exp(shifted) - log_sum_exp(v) - 123.0) < 1e-12);
}

TEST_CASE("effective sample size") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(ess(std::vector<double>(50, -2.0)) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(ess(std::vector<double>{-inf, 0.7, -inf}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ess(std::vector<double>{0.0, std::log(3.0)}) == doctest::Approx(1.6).epsilon(1e-14));
  CHECK_THROWS_AS(ess(std::vector<double>{-inf, -inf}), DomainError);
  RngState rng(3, 0);
  std::vector<double> w(40);
  for (double& x : w) x = 3.0 * rng.normal();
  const double e = ess(w);
  CHECK(e >= 1.0);
  CHECK(e <= 40.0);
}

TEST_CASE("digamma and trigamma") {
  CHECK(std::abs(digamma(1.0) + 0.57721566490153286) < 1e-10);
  for (double x : {0.05, 0.7, 3.0, 17.5}) CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12);
  CHECK(std::abs(trigamma(1.0) / (std::numbers::pi * std::numbers::pi / 6.0) - 1.0) < 1e-10);
  CHECK(std::abs(trigamma(2.5) - (trigamma(1.5) - 1.0 / (1.5 * 1.5))) < 1e-12);
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(trigamma(-1.0), DomainError);
}

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a{0.1, 0.5, 0.9, 1.3};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(std::vector<double>{1.0, 2.0}, std::vector<double>{5.0, 6.0}).statistic == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1.0, 2.0}, std::vector<double>{1.5, 2.5}).statistic ==
        doctest::Approx(0.5));
  const std::vector<double> w{1.0, -1.0, 1.0, 1.0};
  CHECK_THROWS_AS(ks_two_sample(a, a, std::span<const double>(w)), DomainError);
  const std::vector<double> zeros(4, 0.0);
  CHECK_THROWS_AS(ks_two_sample(a, a, std::span<const double>(zeros)), DomainError);
  CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a), DomainError);
}

TEST_CASE("weighted KS reports a statistic judged against a cap") {
  const std::vector<double> xs{0.0, 1.0, 2.0}, ys{0.0, 1.0, 2.0};
  const std::vector<double> wx{1.0, 1.0, 2.0}, wy{1.0, 1.0, 1.0};
  const auto r = ks_two_sample(xs, ys, std::span<const double>(wx), std::span<const double>(wy),
                               KSThreshold::max_statistic(0.2));
  // weighted cdfs: (1/4, 1/2, 1) against (1/3, 2/3, 1)
  CHECK(r.statistic == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(r.weighted);
  CHECK_FALSE(r.p_approx.has_value());
  CHECK(r.verdict == Verdict::pass);
  CHECK(rejudge(r, KSThreshold::max_statistic(0.1)).verdict == Verdict::fail);
  CHECK(rejudge(r, KSThreshold::level(0.01)).verdict == Verdict::inconclusive);
}

TEST_CASE("KS is invariant under increasing transforms") {
  RngState rng(11, 0);
  std::vector<double> xs(300), ys(200);
  for (double& x : xs) x = rng.normal();
  for (double& y : ys) y = 0.3 + rng.normal();
  auto tx = xs, ty = ys;
  for (double& x : tx) x = std::exp(2.0 * x) + 1.0;
  for (double& y : ty) y = std::exp(2.0 * y) + 1.0;
  const auto r1 = ks_two_sample(xs, ys), r2 = ks_two_sample(tx, ty);
  CHECK(r1.statistic == r2.statistic);
  CHECK(r1.statistic > 0.0);
  CHECK(r1.statistic <= 1.0);
}

TEST_CASE("one-sample KS") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_one_sample(std::vector<double>{0.5}, uniform).statistic == doctest::Approx(0.5));
  const auto step = [](double x) { return x >= 1.0 ? 1.0 : 0.0; };
  CHECK(ks_one_sample(std::vector<double>(20, 1.0), step).statistic == 0.0);
  const auto bad = [](double) { return 1.5; };
  CHECK_THROWS_AS(ks_one_sample(std::vector<double>{0.5}, bad), ContractError);

  // 10^4 draws from the cdf itself stay below 0.02 on every seed tried
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngState rng(seed, 7);
    std::vector<double> xs(10000);
    for (double& x : xs) x = rng.uniform();
    const auto r = ks_one_sample(xs, uniform);
    CHECK(r.statistic < 0.02);
    CHECK(r.p_approx.has_value());
  }
}

TEST_CASE("two-sample KS p-value is calibrated under the null") {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RngState rng(seed, 1);
    std::vector<double> xs(400), ys(300);
    for (double& x : xs) x = rng.normal();
    for (double& y : ys) y = rng.normal();
    rejections += ks_two_sample(xs, ys, std::nullopt, std::nullopt, KSThreshold::level(0.05)).verdict == Verdict::fail;
  }
  // binomial(200, 0.05): mean 10, sd about 3.1
  CHECK(rejections >= 2);
  CHECK(rejections <= 22);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == 2.5);
  CHECK(variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK_THROWS_AS(quantile(v, 1.5), DomainError);
  CHECK_THROWS_AS(variance(std::vector<double>{1.0}), DomainError);
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
}
