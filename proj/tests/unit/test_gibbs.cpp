#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hslg/errors.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/glauber.hpp"
#include "hslg/resample.hpp"
#include "hslg/stats.hpp"

using namespace hslg;
using namespace hslg::gibbs;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GibbsSpec one_curve(double L, double alpha, double a, int intervals = 32) {
  GibbsSpec s;
  s.side = Side::one_sided;
  s.kind = Kind::continuum;
  s.A1 = -1.0;
  s.A2 = 0.0;
  s.left = {a};
  s.scale = L;
  s.alpha = alpha;
  s.grid_intervals = intervals;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  auto s = one_curve(4.0, 0.0, 0.0);
  CHECK_NOTHROW(s.validate());
  s.A2 = -0.5;
  CHECK_THROWS_AS(s.validate(), ContractError);
  s = one_curve(4.0, 0.0, 0.0);
  s.left = {0.0, 1.0};
  CHECK_THROWS_AS(s.validate(), ContractError);
  GibbsSpec d;
  d.kind = Kind::discrete;
  d.scale = 4.0;
  d.A1 = -0.3;  // not a multiple of 1/2
  d.left = {0.0};
  CHECK_THROWS(d.validate());
}

TEST_CASE("log-gamma walks") {
  RngState rng(1, 0);
  const auto w = sample_lg_walk(rng, 4, -2.0, 0.0, 0.3, 0.5);
  CHECK(w.size() == 5);
  CHECK(w.front() == 0.3);
  const auto b = sample_lg_bridge(rng, 4, -2.0, 0.0, 0.3, -0.4, 0.5);
  CHECK(b.front() == doctest::Approx(0.3));
  CHECK(b.back() == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK_THROWS_AS(sample_lg_walk(rng, 0, -1.0, 0.0, 0.0, 0.5), DomainError);
}

TEST_CASE("discrete RN exponent") {
  // rows = (ceiling, curve, floor); infinite boundaries contribute nothing
  const std::vector<double> curve{0.1, -0.2, 0.4, 0.0, 0.3};
  std::vector<std::vector<double>> rows{std::vector<double>(5, kInf), curve, std::vector<double>(5, -kInf)};
  CHECK(log_W_discrete_rows(rows, 4, -4) == 0.0);
  rows[0] = std::vector<double>(5, 0.2);  // the curve crosses the ceiling
  const double w = log_W_discrete_rows(rows, 4, -4);
  CHECK(w < 0.0);
  rows[0] = std::vector<double>(5, 50.0);
  CHECK(log_W_discrete_rows(rows, 4, -4) <= 0.0);
  CHECK(log_W_discrete_rows(rows, 4, -4) > w);
}

TEST_CASE("continuum weight and importance sampling") {
  auto s = one_curve(4.0, 0.0, 1.0);
  s.floor = [](double) { return 0.0; };
  RngState rng(2, 0);
  const auto set = importance_sample_gibbs(rng, s, 500);
  CHECK(set.samples.size() == 500);
  for (double lw : set.log_weights) CHECK(lw <= 0.0);
  CHECK(set.ess >= 1.0);
  CHECK(set.ess <= 500.0);
  const double m = set.weighted_mean([](const Paths& p) { return p[0].back(); });
  CHECK(std::isfinite(m));
  CHECK(set.weighted_standard_error([](const Paths& p) { return p[0].back(); }) > 0.0);
}

TEST_CASE("chain without constraints samples the tilted Brownian law") {
  // exp(-alpha sqrt(L) B(0)) tilts BM from a over unit time to N(a - alpha sqrt(L), 1)
  const double L = 4.0, alpha = 0.5, a = 0.3;
  const auto spec = one_curve(L, alpha, a, 16);
  ChainConfig cfg;
  cfg.burn_in = 20000;
  cfg.steps = 400000;
  cfg.thin = 200;
  RngState rng(3, 0);
  const auto res = metropolis_chain(rng, spec, cfg, [](const Paths& p) { return std::vector<double>{p[0].back()}; });
  std::vector<double> ends;
  for (const auto& o : res.observations) ends.push_back(o[0]);
  CHECK(ends.size() == 2000);
  CHECK_FALSE(res.mixing_warning);
  const double mu = a - alpha * std::sqrt(L);
  CHECK(std::abs(stats::mean(ends) - mu) < 4.0 * stats::batch_means_se(ends));
  const auto ks = stats::ks_one_sample(ends, [&](double y) { return stats::normal_cdf(y - mu); });
  CHECK(ks.statistic < 0.06);
}

TEST_CASE("raising the floor raises the curve (one-sided dominance)") {
  // the chain observes B(-1/2); floors -1 and 0.5 at L = 4
  auto run = [](double floor_level, std::uint64_t seed) {
    auto spec = one_curve(4.0, 0.5, 1.0, 16);
    spec.floor = [floor_level](double) { return floor_level; };
    ChainConfig cfg;
    cfg.burn_in = 20000;
    cfg.steps = 300000;
    cfg.thin = 150;
    RngState rng(seed, 0);
    const auto res = metropolis_chain(rng, spec, cfg, [](const Paths& p) { return std::vector<double>{p[0][8]}; });
    std::vector<double> out;
    for (const auto& o : res.observations) out.push_back(o[0]);
    return out;
  };
  const auto low = run(-1.0, 10), high = run(0.5, 11);
  const auto ks = stats::ks_two_sample(high, low);
  // sup(F_high - F_low) must not be significant, the reverse must be
  CHECK(stats::ks_one_sided_p(ks.d_plus, high.size(), low.size()) > 0.01);
  CHECK(stats::ks_one_sided_p(ks.d_minus, high.size(), low.size()) < 0.01);
  CHECK(stats::median(high) > stats::median(low));
}

TEST_CASE("Glauber coupling") {
  SoftBarrierSpec s;
  s.L = 9.0;
  s.a = 0.5;
  s.beta = 1.0;
  auto upper = s;
  upper.a = 0.9;
  CHECK(classify_coupling(upper, s) == CouplingCase::start);
  auto heavy = s;
  heavy.beta = 2.0;
  CHECK(classify_coupling(s, heavy) == CouplingCase::beta);
  auto shifted = s;
  shifted.kappa = 0.3;
  CHECK(classify_coupling(s, shifted) == CouplingCase::kappa);
  CHECK(classify_coupling(s, s) == CouplingCase::identical);
  CHECK_THROWS_AS(classify_coupling(s, upper), ContractError);
  auto other_L = s;
  other_L.L = 4.0;
  CHECK_THROWS_AS(classify_coupling(s, other_L), ContractError);

  for (auto [a, b] : {std::pair{upper, s}, std::pair{s, heavy}, std::pair{s, shifted}}) {
    RngState rng(12, 0);
    const auto r = coupled_glauber_softbarrier(rng, a, b, 20000, 32);
    CHECK(r.steps == 20000);
    CHECK(r.violations == 0);
    CHECK(r.accepted_upper > 0);
  }
}

TEST_CASE("resampling invariance on a small run") {
  ResampleConfig cfg;
  cfg.replicas = 2000;
  cfg.imh_steps = 200;
  cfg.ess_floor = 50.0;
  const auto good = gibbs_resample_invariance(cfg);
  CHECK(good.n == 5);
  CHECK(good.ks.verdict == stats::Verdict::pass);
  cfg.wrong_floor = true;
  CHECK(gibbs_resample_invariance(cfg).ks.verdict == stats::Verdict::fail);
  cfg.wrong_floor = false;
  cfg.imh_steps = 0;
  CHECK(gibbs_resample_invariance(cfg).ks.statistic == 0.0);
}
