#include "hslg/limit_verify.hpp"

#include <array>
#include <cmath>
#include <string>

#include "hslg/errors.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/kernels.hpp"
#include "hslg/limit_samplers.hpp"

namespace hslg::limits {

namespace {

struct ChainOutput {
  std::vector<std::vector<double>> observations;
  double acceptance_rate = 0.0;
  bool mixing_warning = false;
};

// Runs plan.chains chains from starting paths drawn by `init` and pools the
// observations in chain order.
template <class Init>
ChainOutput run_chains(const gibbs::GibbsSpec& spec, const ChainPlan& plan, int samples, std::uint64_t seed,
                       std::uint64_t stream_base, const gibbs::Observable& observe, Init&& init, Execution ex) {
  HSLG_REQUIRE(plan.chains >= 1 && samples >= plan.chains, DomainError, "need at least one sample per chain");
  const int per_chain = samples / plan.chains;
  const int extra = samples % plan.chains;
  auto results = map_replicas(
      static_cast<std::size_t>(plan.chains),
      [&](std::size_t c) {
        RngState rng(seed, stream_base + c);
        RngState init_rng = rng.derive(1);
        const gibbs::Paths start = init(init_rng);
        gibbs::ChainConfig cfg;
        cfg.burn_in = plan.burn_in;
        cfg.thin = plan.thin;
        cfg.steps = plan.thin * (per_chain + (static_cast<int>(c) < extra ? 1 : 0));
        return gibbs::metropolis_chain(rng, spec, cfg, observe, &start);
      },
      ex);
  ChainOutput out;
  for (auto& r : results) {
    out.acceptance_rate += r.acceptance_rate / plan.chains;
    out.mixing_warning = out.mixing_warning || r.mixing_warning;
    for (auto& o : r.observations) out.observations.push_back(std::move(o));
  }
  return out;
}

// CDF of (U + V) / 2 with U ~ N(mean, var) independent of V ~ F.
double half_sum_cdf(double z, double mean, double var, const kernels::TabulatedCdf& F) {
  constexpr int nodes = 801;
  const double sd = std::sqrt(var);
  const double lo = mean - 8.0 * sd, h = 16.0 * sd / (nodes - 1);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double u = lo + i * h;
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    acc += w * F(2.0 * z - u) * kernels::heat_kernel(var, u - mean);
  }
  return acc * h;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

void check_L_list(const std::vector<double>& L_list) {
  HSLG_REQUIRE(!L_list.empty(), ContractError, "L_list must not be empty");
  for (double L : L_list) HSLG_REQUIRE(L > 0.0, DomainError, "L values must be positive");
}

}  // namespace

WconvReport verify_wconv(const WconvConfig& config, Execution ex) {
  HSLG_REQUIRE(config.A < 0.0 && config.a > 0.0, DomainError, "verify_wconv: need A < 0 and a > 0");
  HSLG_REQUIRE(config.chain.grid_intervals % 2 == 0, DomainError, "verify_wconv: grid_intervals must be even");
  check_L_list(config.L_list);
  const int M = config.chain.grid_intervals;
  const auto grid = uniform_grid(config.A, M);
  const auto cdf = kernels::lambda_plus_marginal_cdf(config.A, config.a, config.A / 2.0);

  WconvReport report;
  std::vector<double> statistics;
  bool mixing_ok = true;
  for (std::size_t l = 0; l < config.L_list.size(); ++l) {
    gibbs::GibbsSpec spec;
    spec.k = spec.ell = 1;
    spec.A1 = config.A;
    spec.A2 = 0.0;
    spec.left = {config.a};
    spec.floor = [](double) { return 0.0; };
    spec.scale = config.L_list[l];
    spec.alpha = config.alpha;
    spec.grid_intervals = M;
    const auto chains = run_chains(
        spec, config.chain, config.samples, config.seed, 1000 * l,
        [M](const gibbs::Paths& p) { return std::vector<double>{p[0][M / 2], p[0][M]}; },
        [&](RngState& rng) { return gibbs::Paths{sample_lambda_plus(rng, config.A, config.a, grid)}; }, ex);

    WconvLevel level;
    level.L = config.L_list[l];
    for (const auto& o : chains.observations) {
      level.marginal.push_back(o[0]);
      level.b0.push_back(o[1]);
    }
    level.ks = stats::ks_one_sample(level.marginal, cdf, stats::KSThreshold::max_statistic(config.ks_cap));
    level.b0_mean = stats::mean(level.b0);
    level.b0_standard_error = stats::batch_means_se(level.b0);
    level.acceptance_rate = chains.acceptance_rate;
    level.mixing_warning = chains.mixing_warning;
    if (config.a * std::sqrt(level.L) >= 4.0) {
      const auto exact = kernels::soft_barrier_marginal_cdf(level.L, 1.0, config.A, config.a, config.alpha, config.A / 2.0);
      level.finite_L_distance = kernels::sup_distance(exact, cdf);
      level.ks_finite_L = stats::ks_one_sample(level.marginal, exact, stats::KSThreshold::level(0.01));
    }
    mixing_ok = mixing_ok && !chains.mixing_warning;
    statistics.push_back(level.ks.statistic);
    report.levels.push_back(std::move(level));
  }
  report.ks_decreasing = strictly_decreasing(statistics);
  const auto& last = report.levels.back();
  const bool pass = report.ks_decreasing && last.ks.verdict == stats::Verdict::pass &&
                    std::abs(last.b0_mean) < config.b0_mean_cap;
  report.verdict = !mixing_ok ? stats::Verdict::inconclusive : pass ? stats::Verdict::pass : stats::Verdict::fail;
  return report;
}

std::string_view to_string(Regime r) { return r == Regime::supercritical ? "supercritical" : "critical"; }

Regime regime_from_string(std::string_view s) {
  if (s == "supercritical") return Regime::supercritical;
  if (s == "critical") return Regime::critical;
  throw DomainError("unknown regime: " + std::string(s));
}

MultipathReport verify_multipath_limit(const MultipathConfig& config, Execution ex) {
  const std::size_t n = config.starts.size();
  HSLG_REQUIRE(n >= 2 && n % 2 == 0, ContractError, "verify_multipath_limit: need 2m starts");
  HSLG_REQUIRE(config.A < 0.0, DomainError, "verify_multipath_limit: need A < 0");
  HSLG_REQUIRE(config.chain.grid_intervals % 2 == 0 && config.limit_grid_intervals % 2 == 0, DomainError,
               "verify_multipath_limit: grid sizes must be even");
  for (std::size_t i = 1; i < n; ++i)
    HSLG_REQUIRE(config.starts[i - 1] > config.starts[i], DomainError, "starts must be strictly decreasing");
  HSLG_REQUIRE(config.starts.back() > config.floor, DomainError, "starts must lie above the floor");
  check_L_list(config.L_list);

  const double floor_value = config.floor;
  const gibbs::BoundaryFn g = [floor_value](double) { return floor_value; };
  const bool critical = config.regime == Regime::critical;

  // limit samples
  const auto limit_grid = uniform_grid(config.A, config.limit_grid_intervals);
  const int lmid = config.limit_grid_intervals / 2;
  auto draw_limit = [&](RngState& rng, std::span<const double> grid) {
    return critical ? sample_critical_ni_bm(rng, config.A, config.starts, config.mu, g, grid)
                    : sample_mpbm(rng, config.A, config.starts, g, grid);
  };
  const auto limit_draws = map_replicas(
      static_cast<std::size_t>(config.samples),
      [&](std::size_t r) {
        RngState rng(config.seed ^ 0x5eed, r);
        const auto s = draw_limit(rng, limit_grid);
        return std::array<double, 4>{s.curves[0][lmid], s.curves[0][lmid] - s.curves[1][lmid],
                                     s.curves[0].back() - s.curves[1].back(), static_cast<double>(s.attempts)};
      },
      ex);
  std::vector<double> limit_curve1, limit_gap, limit_terminal;
  double attempts = 0.0;
  for (const auto& d : limit_draws) {
    limit_curve1.push_back(d[0]);
    limit_gap.push_back(d[1]);
    limit_terminal.push_back(d[2]);
    attempts += d[3];
  }

  MultipathReport report;
  report.regime = config.regime;
  report.limit_median_terminal_gap = stats::median(limit_terminal);
  report.limit_acceptance_rate = static_cast<double>(config.samples) / attempts;

  const int M = config.chain.grid_intervals;
  const auto chain_grid = uniform_grid(config.A, M);
  bool mixing_ok = true;
  for (std::size_t l = 0; l < config.L_list.size(); ++l) {
    const double L = config.L_list[l];
    gibbs::GibbsSpec spec;
    spec.k = 1;
    spec.ell = static_cast<int>(n);
    spec.A1 = config.A;
    spec.A2 = 0.0;
    spec.left = config.starts;
    spec.floor = g;
    spec.scale = L;
    spec.alpha = critical ? config.mu / std::sqrt(L) : config.alpha;
    spec.grid_intervals = M;
    const auto chains = run_chains(
        spec, config.chain, config.samples, config.seed, 1000 * l,
        [M](const gibbs::Paths& p) {
          return std::vector<double>{p[0][M / 2], p[0][M / 2] - p[1][M / 2], p[0][M] - p[1][M]};
        },
        [&](RngState& rng) {
          const auto s = draw_limit(rng, chain_grid);
          return gibbs::Paths(s.curves.begin(), s.curves.end());
        },
        ex);
    std::vector<double> curve1, gap, terminal;
    for (const auto& o : chains.observations) {
      curve1.push_back(o[0]);
      gap.push_back(o[1]);
      terminal.push_back(o[2]);
    }
    MultipathLevel level;
    level.L = L;
    level.curve1 = stats::ks_two_sample(curve1, limit_curve1, std::nullopt, std::nullopt,
                                        stats::KSThreshold::level(config.level));
    level.gap = stats::ks_two_sample(gap, limit_gap, std::nullopt, std::nullopt,
                                     stats::KSThreshold::level(config.level));
    level.median_terminal_gap = stats::median(terminal);
    level.acceptance_rate = chains.acceptance_rate;
    level.mixing_warning = chains.mixing_warning;
    const double a_gap = config.starts[0] - config.starts[1];
    if (!critical && n == 2 && config.floor == -std::numeric_limits<double>::infinity() &&
        a_gap * std::sqrt(L) >= 4.0) {
      const double x = config.A / 2.0;
      const auto exact = kernels::soft_barrier_marginal_cdf(L, 2.0, config.A, a_gap, config.alpha, x);
      const auto limit = kernels::lambda_plus_marginal_cdf(config.A, a_gap, x, 4001, 2.0);
      level.gap_finite_L_distance = kernels::sup_distance(exact, limit);
      level.gap_ks_finite_L = stats::ks_one_sample(gap, exact, stats::KSThreshold::level(0.01));
      const double u_mean = config.starts[0] + config.starts[1], u_var = 2.0 * (x - config.A);
      auto exact_c1 = [&](double z) { return half_sum_cdf(z, u_mean, u_var, exact); };
      double dist = 0.0;
      const double zlo = 0.5 * (u_mean - 8.0 * std::sqrt(u_var)), zhi = 0.5 * (u_mean + 8.0 * std::sqrt(u_var) + limit.hi);
      for (int i = 0; i <= 800; ++i) {
        const double z = zlo + (zhi - zlo) * i / 800.0;
        dist = std::max(dist, std::abs(exact_c1(z) - half_sum_cdf(z, u_mean, u_var, limit)));
      }
      level.curve1_finite_L_distance = dist;
      level.curve1_ks_finite_L = stats::ks_one_sample(curve1, exact_c1, stats::KSThreshold::level(0.01));
    }
    mixing_ok = mixing_ok && !chains.mixing_warning;
    report.levels.push_back(std::move(level));
  }

  const auto& last = report.levels.back();
  const bool ks_ok = last.curve1.verdict == stats::Verdict::pass && last.gap.verdict == stats::Verdict::pass;
  report.trend_ok = report.levels.back().median_terminal_gap < report.levels.front().median_terminal_gap;
  report.contrast_ok = report.limit_median_terminal_gap > config.gap_floor;
  for (const auto& lv : report.levels) report.contrast_ok = report.contrast_ok && lv.median_terminal_gap > config.gap_floor;
  const bool pass = critical ? report.contrast_ok : ks_ok && report.trend_ok;
  report.verdict = !mixing_ok ? stats::Verdict::inconclusive : pass ? stats::Verdict::pass : stats::Verdict::fail;
  return report;
}

}  // namespace hslg::limits
