#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "hslg/environment.hpp"
#include "hslg/errors.hpp"
#include "hslg/stats.hpp"

using namespace hslg;

TEST_CASE("inverse-gamma draws are positive and reject bad shapes") {
  RngState rng(1, 0);
  for (int k = 0; k < 1000; ++k) CHECK(sample_inverse_gamma(rng, 0.3) > 0.0);
  CHECK_THROWS_AS(sample_inverse_gamma(rng, 0.0), DomainError);
  CHECK_THROWS_AS(sample_inverse_gamma(rng, -1.0), DomainError);
}

TEST_CASE("log inverse-gamma moments match digamma and trigamma") {
  for (double beta : {0.4, 2.5, 4.0}) {
    RngState rng(11, static_cast<std::uint64_t>(beta * 10));
    const int n = 400000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_log_inverse_gamma(rng, beta);
    const double m = stats::mean(xs), v = stats::variance(xs);
    const double se_mean = std::sqrt(stats::trigamma(beta) / n);
    CHECK(std::abs(m + stats::digamma(beta)) < 4 * se_mean);
    // variance of the sample variance ~ (mu4 - sigma^4)/n; mu4 = psi''' + 3 psi'^2
    double mu4 = 0.0;
    for (double x : xs) mu4 += std::pow(x - m, 4);
    mu4 /= n;
    CHECK(std::abs(v - stats::trigamma(beta)) < 4 * std::sqrt((mu4 - v * v) / n));
  }
}

TEST_CASE("same stream reproduces, distinct streams differ") {
  RngState a(3, 5), b(3, 5), c(3, 6);
  const auto ea = build_half_env(a, 6, 2.0, 0.5);
  const auto eb = build_half_env(b, 6, 2.0, 0.5);
  const auto ec = build_half_env(c, 6, 2.0, 0.5);
  CHECK(ea.raw() == eb.raw());
  CHECK(ea.raw() != ec.raw());
}

TEST_CASE("environment validation") {
  RngState rng(1, 1);
  CHECK_THROWS_AS(build_half_env(rng, 3, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(build_half_env(rng, 3, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(build_full_perturbed_env(rng, 3, 3, 1.0, -2.0), DomainError);
  const auto one = build_half_env(rng, 1, 2.0, 0.5);
  CHECK(one.raw().size() == 1);
  CHECK_THROWS_AS(one.log_w(1, 2), RangeError);
}

TEST_CASE("off-diagonal log weight mean") {
  const int reps = 10000;
  std::vector<double> xs;
  for (int r = 0; r < reps; ++r) {
    RngState rng(8, r);
    xs.push_back(build_half_env(rng, 6, 2.0, 0.5).log_w(5, 2));
  }
  CHECK(std::abs(stats::mean(xs) + stats::digamma(4.0)) < 4 * std::sqrt(stats::trigamma(4.0) / reps));
}

TEST_CASE("perturbed first row matches bulk when alpha equals theta") {
  std::vector<double> first, bulk;
  for (int r = 0; r < 10000; ++r) {
    RngState rng(9, r);
    const auto env = build_full_perturbed_env(rng, 2, 1, 1.5, 1.5);
    first.push_back(env.log_w(1, 1));
    bulk.push_back(env.log_w(2, 1));
  }
  const auto report = stats::ks_two_sample(first, bulk, std::nullopt, std::nullopt, stats::KSThreshold::level(0.01));
  CHECK(report.verdict == stats::Verdict::pass);
}

TEST_CASE("symmetrized lookup") {
  RngState rng(4, 0);
  const auto env = build_half_env(rng, 50, 2.0, 0.5);
  const auto sym = symmetrize(env);
  CHECK(sym.log_w(2, 3) == env.log_w(3, 2));
  CHECK(sym.log_w(1, 1) == env.log_w(1, 1) - std::log(2.0));
  for (int i = 1; i <= 50; ++i)
    for (int j = 1; j <= 50; ++j)
      if (i != j) REQUIRE(sym.log_w(i, j) == sym.log_w(j, i));
  CHECK_THROWS_AS(sym.log_w(51, 1), RangeError);
}

TEST_CASE("csv and binary cache round trip") {
  RngState rng(6, 2);
  const auto env = build_half_env(rng, 5, 2.0, 0.5);
  std::stringstream ss;
  write_env_csv(ss, env);
  CHECK(ss.str().rfind("i,j,log_w\n", 0) == 0);
  const auto back = read_half_env_csv(ss, 2.0, 0.5);
  CHECK(back.raw() == env.raw());

  const auto dir = std::filesystem::temp_directory_path() / "hslg_env_cache_test";
  std::filesystem::remove_all(dir);
  EnvCache cache(dir);
  const auto first = cache.get_or_build(6, 2, 5, 2.0, 0.5);
  CHECK(std::filesystem::exists(cache.path_for(6, 2, 5, 2.0, 0.5)));
  const auto second = cache.get_or_build(6, 2, 5, 2.0, 0.5);
  CHECK(first.raw() == env.raw());
  CHECK(second.raw() == env.raw());
  std::filesystem::remove_all(dir);
}
