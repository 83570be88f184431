#include "hslg/resample.hpp"

#include <cmath>
#include <limits>

#include "hslg/environment.hpp"
#include "hslg/errors.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/polymer.hpp"

namespace hslg::gibbs {

namespace {

struct ReplicaOutcome {
  double original = 0.0;
  double resampled = 0.0;
  double ess = 0.0;
  int accepted = 0;
};

}  // namespace

ResampleReport gibbs_resample_invariance(const ResampleConfig& cfg, Execution ex) {
  HSLG_REQUIRE(cfg.N >= 1 && cfg.t >= 1.0, DomainError, "need N >= 1 and t >= 1");
  HSLG_REQUIRE(cfg.k >= 1 && cfg.k <= 2, DomainError, "resampling supports k in {1, 2}");
  HSLG_REQUIRE(cfg.replicas >= 1 && cfg.imh_steps >= 0, DomainError, "need replicas >= 1, imh_steps >= 0");
  const int n = polymer::ensemble_size_for(cfg.N, cfg.t);
  HSLG_REQUIRE(n <= 6, DomainError, "resampling is meant for n <= 6");
  const double sqrtN = std::sqrt(static_cast<double>(cfg.N));
  const int g_left = static_cast<int>(std::lround(cfg.window_left * sqrtN));
  HSLG_REQUIRE(std::abs(cfg.window_left * sqrtN - g_left) < 1e-9 && g_left < 0, DomainError,
               "window endpoint must be a negative point of Z_N");
  const int width = -g_left;  // grid intervals in the window
  HSLG_REQUIRE(width % 2 == 0, DomainError, "window needs a grid midpoint");
  // curve k+1 must cover the window
  HSLG_REQUIRE(2 * n - 2 * (cfg.k + 1) + 1 >= width, DomainError, "window wider than curve k+1");

  GibbsSpec spec;
  spec.side = Side::one_sided;
  spec.kind = Kind::discrete;
  spec.k = 1;
  spec.ell = cfg.k;
  spec.A1 = cfg.window_left;
  spec.A2 = 0.0;
  spec.scale = cfg.N;
  spec.alpha = cfg.alpha;
  spec.left.assign(cfg.k, 0.0);
  spec.convention = cfg.convention;
  spec.validate();
  const int mid = width / 2;

  const auto outcomes = map_replicas(
      static_cast<std::size_t>(cfg.replicas),
      [&](std::size_t r) {
        RngState rng(cfg.seed, r);
        RngState env_rng = rng.derive(1);
        RngState kernel_rng = rng.derive(2);
        const auto env = build_half_env(env_rng, 2 * n, polymer::theta_for_scale(cfg.N), cfg.alpha);
        const auto H = polymer::scaled_ensemble(polymer::hslg_line_ensemble(env, n, cfg.k + 1), cfg.N, cfg.t);

        // window values in left-to-right order: grid index m <-> x sqrt(N) = g_left + m
        const auto window_values = [&](int curve) {
          std::vector<double> v(width + 1);
          for (int m = 0; m <= width; ++m) v[m] = H.curves[curve - 1].values[static_cast<std::size_t>(width - m)];
          return v;
        };
        Paths state;
        for (int i = 1; i <= cfg.k; ++i) state.push_back(window_values(i));
        std::vector<std::vector<double>> rows;
        rows.emplace_back(width + 1, std::numeric_limits<double>::infinity());
        for (const auto& p : state) rows.push_back(p);
        rows.push_back(cfg.wrong_floor ? std::vector<double>(width + 1, -std::numeric_limits<double>::infinity())
                                       : window_values(cfg.k + 1));
        const auto weight = [&](const Paths& p) {
          for (int c = 0; c < cfg.k; ++c) rows[c + 1] = p[c];
          return log_W_discrete_rows(rows, cfg.N, g_left, cfg.convention);
        };

        ReplicaOutcome out;
        out.original = state[0][mid];
        GibbsSpec local = spec;
        for (int c = 0; c < cfg.k; ++c) local.left[c] = state[c][0];
        double current = weight(state);
        std::vector<double> proposal_weights;
        proposal_weights.reserve(cfg.imh_steps);
        for (int s = 0; s < cfg.imh_steps; ++s) {
          Paths proposal = sample_free(kernel_rng, local);
          const double w = weight(proposal);
          proposal_weights.push_back(w);
          if (std::log(kernel_rng.uniform()) < w - current) {
            state = std::move(proposal);
            current = w;
            ++out.accepted;
          }
        }
        out.resampled = state[0][mid];
        out.ess = proposal_weights.empty() ? 0.0 : stats::ess(proposal_weights);
        return out;
      },
      ex);

  ResampleReport report;
  report.n = n;
  std::vector<double> ess;
  long long accepted = 0;
  for (const auto& o : outcomes) {
    report.original.push_back(o.original);
    report.resampled.push_back(o.resampled);
    ess.push_back(o.ess);
    accepted += o.accepted;
  }
  report.median_ess = stats::median(ess);
  report.acceptance_rate =
      cfg.imh_steps > 0 ? static_cast<double>(accepted) / (static_cast<double>(cfg.imh_steps) * cfg.replicas) : 0.0;
  report.ks = stats::ks_two_sample(report.original, report.resampled, std::nullopt, std::nullopt,
                                   stats::KSThreshold::level(cfg.level));
  if (cfg.imh_steps > 0 && report.median_ess < cfg.ess_floor) report.ks.verdict = stats::Verdict::inconclusive;
  return report;
}

}  // namespace hslg::gibbs
