#include "hslg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "hslg/environment.hpp"
#include "hslg/errors.hpp"
#include "hslg/glauber.hpp"
#include "hslg/kernels.hpp"
#include "hslg/limit_samplers.hpp"
#include "hslg/limit_verify.hpp"
#include "hslg/parallel.hpp"
#include "hslg/polymer.hpp"
#include "hslg/quadrature.hpp"
#include "hslg/resample.hpp"

namespace hslg::lab {

namespace {

using stats::Verdict;
using Defaults = std::map<std::string, std::string>;

Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

std::string verdict_text(Verdict v) { return std::string(stats::to_string(v)); }

Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? Json("nan") : Json(v > 0 ? "inf" : "-inf");
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

int as_int(const ExperimentConfig& c, const std::string& key) { return static_cast<int>(c.get_int(key)); }

// ---------------------------------------------------------------- polymer

Report sym_identity(const ExperimentConfig& c) {
  const int n = as_int(c, "n");
  const int envs = as_int(c, "environments");
  const double theta = c.get_double("theta"), alpha = c.get_double("alpha");
  const double threshold = c.get_double("threshold");
  const std::uint64_t seed = c.get_u64("seed");
  if (n < 1 || envs < 1) throw ConfigError("sym-identity: need n >= 1 and environments >= 1");

  const auto worst = map_replicas(static_cast<std::size_t>(envs), [&](std::size_t e) {
    RngState rng(seed, e);
    const auto env = build_half_env(rng, n, theta, alpha);
    const polymer::HalfPartitionTable half(env);
    const polymer::SymPartitionTable one(symmetrize(env), 1, n, n);
    double d = 0.0;
    for (int p = 1; p <= n; ++p)
      for (int q = 1; q <= p; ++q) d = std::max(d, std::abs(std::log(2.0) + one.log_z(p, q) - half.log_z(p, q)));
    return d;
  });

  Report report;
  Table table{"discrepancy", {"environment", "max_discrepancy"}, {}};
  for (std::size_t e = 0; e < worst.size(); ++e) table.add_row({cell(static_cast<long long>(e)), cell(worst[e])});
  const double max_d = *std::max_element(worst.begin(), worst.end());
  Check check{"symmetrization-identity", verdict_of(max_d < threshold), {}};
  check.detail["max_discrepancy"] = max_d;
  check.detail["threshold"] = threshold;
  check.detail["environments"] = envs;
  report.checks.push_back(check);
  report.tables.push_back(table);

  // line ensemble of the first environment, as far as the octant allows
  const int n_ens = n / 2;
  if (n_ens >= 1) {
    RngState rng(seed, 0);
    const auto env = build_half_env(rng, n, theta, alpha);
    const auto ens = polymer::hslg_line_ensemble(env, n_ens);
    Table le{"line_ensemble", {"i", "j", "value"}, {}};
    for (int i = 1; i <= ens.curve_count(); ++i)
      for (int j = 1; j <= ens.curve_length(i); ++j)
        le.add_row({cell(static_cast<long long>(i)), cell(static_cast<long long>(j)), cell(ens.value(i, j))});
    report.tables.push_back(le);
  }
  return report;
}

Report row_decomposition(const ExperimentConfig& c) {
  const int m = as_int(c, "m"), n = as_int(c, "n");
  const int envs = as_int(c, "environments");
  const double theta = c.get_double("theta"), alpha = c.get_double("alpha");
  const double threshold = c.get_double("threshold");
  const std::uint64_t seed = c.get_u64("seed");
  if (m < 1 || n < 1 || envs < 1) throw ConfigError("row-decomposition: need m, n, environments >= 1");

  const auto worst = map_replicas(static_cast<std::size_t>(envs), [&](std::size_t e) {
    RngState rng(seed, e);
    return polymer::verify_row_decomposition(build_full_perturbed_env(rng, m, n, theta, alpha), m, n);
  });
  Report report;
  Table table{"discrepancy", {"environment", "max_discrepancy"}, {}};
  for (std::size_t e = 0; e < worst.size(); ++e) table.add_row({cell(static_cast<long long>(e)), cell(worst[e])});
  const double max_d = *std::max_element(worst.begin(), worst.end());
  Check check{"first-row-decomposition", verdict_of(max_d < threshold), {}};
  check.detail["max_discrepancy"] = max_d;
  check.detail["threshold"] = threshold;
  check.detail["environments"] = envs;
  report.checks.push_back(check);
  report.tables.push_back(table);
  return report;
}

Report bw_identity(const ExperimentConfig& c) {
  const int m = as_int(c, "m"), n = as_int(c, "n");
  const int replicas = as_int(c, "replicas");
  const double theta = c.get_double("theta"), alpha = c.get_double("alpha");
  const double level = c.get_double("level");
  const std::uint64_t seed = c.get_u64("seed");
  if (replicas < 1) throw ConfigError("bw-identity: need replicas >= 1");

  const auto pairs = map_replicas(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    RngState rng(seed, r);
    return polymer::sample_bw_identity_pair(rng, theta, alpha, m, n);
  });
  std::vector<double> full, half;
  Table table{"samples", {"replica", "log_z_full", "log_z_half_sum"}, {}};
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    full.push_back(pairs[r].first);
    half.push_back(pairs[r].second);
    table.add_row({cell(static_cast<long long>(r)), cell(pairs[r].first), cell(pairs[r].second)});
  }
  const auto ks = stats::ks_two_sample(full, half, std::nullopt, std::nullopt, stats::KSThreshold::level(level));
  Report report;
  report.checks.push_back({"distributional-identity", ks.verdict, {{"ks", to_json(ks)}}});
  report.tables.push_back(table);
  return report;
}

// ---------------------------------------------------------------- gibbs

gibbs::DiscreteConvention convention_from(const std::string& s) {
  if (s == "ensemble") return gibbs::DiscreteConvention::ensemble;
  if (s == "literal") return gibbs::DiscreteConvention::literal;
  throw ConfigError("convention must be 'ensemble' or 'literal', got '" + s + "'");
}

Report gibbs_resample(const ExperimentConfig& c) {
  gibbs::ResampleConfig rc;
  rc.N = as_int(c, "N");
  rc.t = c.get_double("t");
  rc.k = as_int(c, "k");
  rc.window_left = c.get_double("window_left");
  rc.alpha = c.get_double("alpha");
  rc.replicas = as_int(c, "replicas");
  rc.imh_steps = as_int(c, "imh_steps");
  rc.convention = convention_from(c.get("convention"));
  rc.ess_floor = c.get_double("ess_floor");
  rc.level = c.get_double("level");
  rc.seed = c.get_u64("seed");

  auto detail = [](const gibbs::ResampleReport& r) {
    Json j;
    j["ks"] = to_json(r.ks);
    j["n"] = r.n;
    j["median_ess"] = r.median_ess;
    j["acceptance_rate"] = r.acceptance_rate;
    return j;
  };
  Report report;
  const auto main = gibbs::gibbs_resample_invariance(rc);
  report.checks.push_back({"resampling-invariance", main.ks.verdict, detail(main)});

  auto control_cfg = rc;
  control_cfg.wrong_floor = true;
  const auto control = gibbs::gibbs_resample_invariance(control_cfg);
  // the control passes when the test detects the wrong floor
  Verdict cv = control.ks.verdict == Verdict::fail ? Verdict::pass
               : control.ks.verdict == Verdict::pass ? Verdict::fail
                                                      : Verdict::inconclusive;
  report.checks.push_back({"wrong-floor-control", cv, detail(control)});

  Table table{"midpoint", {"replica", "original", "resampled", "resampled_wrong_floor"}, {}};
  for (std::size_t r = 0; r < main.original.size(); ++r)
    table.add_row({cell(static_cast<long long>(r)), cell(main.original[r]), cell(main.resampled[r]),
                   cell(control.resampled[r])});
  report.tables.push_back(table);
  return report;
}

Report monotone_coupling(const ExperimentConfig& c) {
  gibbs::SoftBarrierSpec base;
  base.beta = c.get_double("beta");
  base.L = c.get_double("L");
  base.epsilon = c.get_double("epsilon");
  base.kappa = c.get_double("kappa");
  base.a = c.get_double("a");
  base.A = c.get_double("A");
  base.diffusion = c.get_double("diffusion");
  const long long steps = c.get_int("steps");
  const int N = as_int(c, "N");
  const std::uint64_t seed = c.get_u64("seed");

  struct Case {
    std::string name;
    gibbs::SoftBarrierSpec upper, lower;
  };
  std::vector<Case> cases;
  cases.push_back({"identical", base, base});
  auto start = base;
  start.a = base.a + c.get_double("start_shift");
  cases.push_back({"start", start, base});
  auto beta = base;
  beta.beta = base.beta + c.get_double("beta_shift");
  cases.push_back({"beta", base, beta});
  auto kappa = base;
  kappa.kappa = base.kappa + c.get_double("kappa_shift");
  cases.push_back({"kappa", base, kappa});

  const auto results = map_replicas(cases.size(), [&](std::size_t i) {
    RngState rng(seed, i);
    return gibbs::coupled_glauber_softbarrier(rng, cases[i].upper, cases[i].lower, steps, N);
  });
  Report report;
  Table table{"violations", {"case", "steps", "violations", "accepted_upper", "accepted_lower"}, {}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = results[i];
    Check check{"coupling-" + cases[i].name, verdict_of(r.violations == 0), {}};
    check.detail["steps"] = r.steps;
    check.detail["violations"] = r.violations;
    check.detail["accepted_upper"] = r.accepted_upper;
    check.detail["accepted_lower"] = r.accepted_lower;
    report.checks.push_back(check);
    table.add_row({cases[i].name, cell(r.steps), cell(r.violations), cell(r.accepted_upper), cell(r.accepted_lower)});
  }
  report.tables.push_back(table);
  return report;
}

// ---------------------------------------------------------------- kernels

struct Worst {
  double value = 0.0;
  Json where = Json::object();
  void update(double err, Json at) {
    if (!(err <= value)) {  // NaN propagates as a failure
      value = err;
      where = std::move(at);
    }
  }
};

double Q(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

// Mass of the Robin kernel in closed form:
// 1 - 2 Q(x / sqrt t) + 2 exp(c x + c^2 t / 2) Q((x + c t) / sqrt t), c = alpha - 1/2.
double robin_mass(double t, double alpha, double x) {
  const double c = alpha - 0.5;
  const double r = std::sqrt(t);
  return 1.0 - 2.0 * Q(x / r) + 2.0 * std::exp(c * x + 0.5 * c * c * t) * Q((x + c * t) / r);
}

double positive_part(const std::function<double(double)>& f, double y) { return y > 0.0 ? f(y) : 0.0; }

Check kernel_check(const std::string& name, const Worst& w, double tol, bool relative = false) {
  Check check{name, verdict_of(w.value <= tol), {}};
  check.detail[relative ? "max_relative_error" : "max_error"] = number(w.value);
  check.detail["tolerance"] = tol;
  check.detail["worst_at"] = w.where;
  return check;
}

Report kernels_suite(const ExperimentConfig& c) {
  const double norm_tol = c.get_double("normalization_tol");
  const double ck_tol = c.get_double("ck_tol");
  const double bc_tol = c.get_double("bc_tol");
  const double fd_h = c.get_double("fd_step");
  const auto alphas = c.get_list("alphas");
  const auto times = c.get_list("times");
  const auto starts = c.get_list("starts");
  const double A = c.get_double("A"), a = c.get_double("a");
  using kernels::heat_kernel;
  using kernels::robin_kernel;
  Report report;

  Worst heat;
  for (double t : times)
    for (double x : starts) {
      auto f = [&](double y) { return heat_kernel(t, x - y); };
      auto g = [&](double z) { return heat_kernel(t, z); };
      const double mass = quad::integrate_to_infinity(f, x, x, std::sqrt(t)) + quad::integrate_to_infinity(g, 0.0, 0.0, std::sqrt(t));
      heat.update(std::abs(mass - 1.0), {{"t", t}, {"x", x}});
    }
  report.checks.push_back(kernel_check("heat-normalization", heat, norm_tol));

  Worst robin_norm;
  for (double alpha : alphas)
    for (double t : times)
      for (double x : starts) {
        auto f = [&](double y) { return robin_kernel(t, alpha, x, y); };
        const double mass = quad::integrate_to_infinity(f, 0.0, x, std::sqrt(t));
        robin_norm.update(std::abs(mass - robin_mass(t, alpha, x)), {{"alpha", alpha}, {"t", t}, {"x", x}});
      }
  report.checks.push_back(kernel_check("robin-normalization", robin_norm, norm_tol));

  Worst robin_ck;
  for (double alpha : alphas)
    for (double x : starts)
      for (double y : starts) {
        const double s = 0.4, t = 0.7;
        auto f = [&](double z) { return robin_kernel(s, alpha, x, z) * robin_kernel(t, alpha, z, y); };
        const double lhs = quad::integrate_to_infinity(f, 0.0, 0.5 * (x + y), std::sqrt(s + t), 1e-14, 1e-10);
        robin_ck.update(std::abs(lhs - robin_kernel(s + t, alpha, x, y)), {{"alpha", alpha}, {"x", x}, {"y", y}});
      }
  report.checks.push_back(kernel_check("robin-chapman-kolmogorov", robin_ck, ck_tol));

  Worst robin_bc;
  for (double alpha : alphas) {
    if (alpha == 0.5) continue;
    for (double t : times)
      for (double y : starts) {
        const double p0 = robin_kernel(t, alpha, 0.0, y);
        const double d = (-3.0 * p0 + 4.0 * robin_kernel(t, alpha, fd_h, y) - robin_kernel(t, alpha, 2.0 * fd_h, y)) /
                         (2.0 * fd_h);
        const double expect = (alpha - 0.5) * p0;
        robin_bc.update(std::abs(d - expect) / std::abs(expect), {{"alpha", alpha}, {"t", t}, {"y", y}});
      }
  }
  report.checks.push_back(kernel_check("robin-boundary-condition", robin_bc, bc_tol, true));

  Worst degenerate;
  for (double t : times)
    for (double x : starts)
      for (double y : starts)
        degenerate.update(std::abs(robin_kernel(t, 0.5, x, y) - (heat_kernel(t, x + y) + heat_kernel(t, x - y))),
                          {{"t", t}, {"x", x}, {"y", y}});
  report.checks.push_back(kernel_check("robin-half-degeneracy", degenerate, 0.0));

  Worst meander_norm, meander_ck;
  const std::vector<double> mtimes{0.1, 0.3, 0.6, 0.9};
  for (double x1 : mtimes) {
    auto f = [&](double y) { return positive_part([&](double v) { return kernels::meander_start(x1, v); }, y); };
    meander_norm.update(std::abs(quad::integrate_to_infinity(f, 0.0, std::sqrt(x1), std::sqrt(x1)) - 1.0),
                        {{"x1", x1}});
  }
  for (std::size_t i = 0; i < mtimes.size(); ++i)
    for (std::size_t j = i + 1; j < mtimes.size(); ++j)
      for (double y1 : {0.2, 1.0}) {
        const double x1 = mtimes[i], x2 = mtimes[j];
        auto f = [&](double y) {
          return positive_part([&](double v) { return kernels::meander_transition(x1, y1, x2, v); }, y);
        };
        meander_norm.update(std::abs(quad::integrate_to_infinity(f, 0.0, y1, std::sqrt(x2 - x1)) - 1.0),
                            {{"x1", x1}, {"x2", x2}, {"y1", y1}});
      }
  for (double y1 : {0.2, 1.0})
    for (double y2 : {0.3, 1.2}) {
      const double x1 = 0.2, xm = 0.5, x2 = 0.8;
      auto f = [&](double z) {
        return z > 0.0 ? kernels::meander_transition(x1, y1, xm, z) * kernels::meander_transition(xm, z, x2, y2) : 0.0;
      };
      const double lhs = quad::integrate_to_infinity(f, 0.0, 0.5 * (y1 + y2), 0.5);
      meander_ck.update(std::abs(lhs - kernels::meander_transition(x1, y1, x2, y2)), {{"y1", y1}, {"y2", y2}});
      auto g = [&](double z) {
        return z > 0.0 ? kernels::meander_start(x1, z) * kernels::meander_transition(x1, z, x2, y2) : 0.0;
      };
      const double lhs2 = quad::integrate_to_infinity(g, 0.0, y2, 0.5);
      meander_ck.update(std::abs(lhs2 - kernels::meander_start(x2, y2)), {{"start", true}, {"y2", y2}});
    }
  report.checks.push_back(kernel_check("meander-normalization", meander_norm, norm_tol));
  report.checks.push_back(kernel_check("meander-chapman-kolmogorov", meander_ck, ck_tol));

  Worst lp_norm, lp_ck, lp_markov;
  const std::vector<double> lp_x{A * 0.75, A * 0.5, A * 0.25, A * 0.05};
  for (double x : lp_x) {
    const double xs[1] = {x};
    auto f = [&](double y) {
      const double ys[1] = {y};
      return kernels::lambda_plus_fdd_density(A, a, xs, ys);
    };
    const double scale = std::sqrt((x - A) * x / A);
    lp_norm.update(std::abs(quad::integrate_to_infinity(f, 0.0, a * x / A + scale, scale) - 1.0), {{"x", x}});
  }
  for (std::size_t i = 0; i + 1 < lp_x.size(); ++i)
    for (double y : {0.2, 0.8}) {
      const double x1 = lp_x[i], x2 = lp_x[i + 1];
      auto f = [&](double v) { return kernels::lambda_plus_step_kernel(x1, y, x2, v); };
      const double scale = std::sqrt(x2 - x1);
      lp_norm.update(std::abs(quad::integrate_to_infinity(f, 0.0, y * x2 / x1 + scale, scale) - 1.0),
                     {{"x1", x1}, {"x2", x2}, {"y", y}});
      for (double y2 : {0.1, 0.5}) {
        const double xs[2] = {x1, x2}, ys[2] = {y, y2}, x1s[1] = {x1}, y1s[1] = {y};
        const double joint = kernels::lambda_plus_fdd_density(A, a, xs, ys);
        const double product = kernels::lambda_plus_fdd_density(A, a, x1s, y1s) *
                               kernels::lambda_plus_step_kernel(x1, y, x2, y2);
        lp_markov.update(std::abs(joint - product) / joint, {{"x1", x1}, {"x2", x2}, {"y1", y}, {"y2", y2}});
      }
    }
  for (double y1 : {0.3, 0.9})
    for (double y2 : {0.05, 0.2}) {
      const double x1 = lp_x[0], xm = lp_x[1], x2 = lp_x[3];
      auto f = [&](double z) {
        return z > 0.0 ? kernels::lambda_plus_step_kernel(x1, y1, xm, z) * kernels::lambda_plus_step_kernel(xm, z, x2, y2)
                       : 0.0;
      };
      const double scale = std::sqrt(xm - x1);
      const double lhs = quad::integrate_to_infinity(f, 0.0, y1 * xm / x1 + scale, scale, 1e-16, 1e-12);
      lp_ck.update(std::abs(lhs - kernels::lambda_plus_step_kernel(x1, y1, x2, y2)), {{"y1", y1}, {"y2", y2}});
    }
  report.checks.push_back(kernel_check("positive-bridge-normalization", lp_norm, norm_tol));
  report.checks.push_back(kernel_check("positive-bridge-chapman-kolmogorov", lp_ck, ck_tol));
  report.checks.push_back(kernel_check("positive-bridge-markov-factorization", lp_markov, 1e-12, true));

  // two-sided comparison with the plain heat kernel on a grid
  const double sandwich_max = c.get_double("sandwich_max");
  const double sandwich_step = c.get_double("sandwich_step");
  const auto sandwich_times = c.get_list("sandwich_times");
  double C = 1.0;
  Json worst_at = Json::object();
  bool finite_positive = true;
  const int cells = static_cast<int>(std::lround(sandwich_max / sandwich_step));
  for (double alpha : alphas)
    for (double t : sandwich_times)
      for (int i = 0; i <= cells; ++i)
        for (int j = 0; j <= cells; ++j) {
          const double x = i * sandwich_step, y = j * sandwich_step;
          const double p = robin_kernel(t, alpha, x, y), h = heat_kernel(t, x - y);
          if (!(p > 0.0 && h > 0.0 && std::isfinite(p))) {
            finite_positive = false;
            continue;
          }
          const double ratio = std::max(p / h, h / p);
          if (ratio > C) {
            C = ratio;
            worst_at = {{"alpha", alpha}, {"t", t}, {"x", x}, {"y", y}};
          }
        }
  Check sandwich{"robin-heat-sandwich", verdict_of(finite_positive && std::isfinite(C)), {}};
  sandwich.detail["C"] = number(C);
  sandwich.detail["worst_at"] = worst_at;
  sandwich.detail["all_positive"] = finite_positive;
  report.checks.push_back(sandwich);

  // density table of the positive bridge marginal at the interval midpoint
  Table density{"positive_bridge_density", {"x", "y", "density"}, {}};
  const double xm = 0.5 * A;
  const double xs[1] = {xm};
  const double top = a * xm / A + 6.0 * std::sqrt((xm - A) * xm / A);
  for (int i = 0; i <= 200; ++i) {
    const double y = top * i / 200.0;
    const double ys[1] = {y};
    density.add_row({cell(xm), cell(y), cell(kernels::lambda_plus_fdd_density(A, a, xs, ys))});
  }
  report.tables.push_back(density);
  return report;
}

// ---------------------------------------------------------------- limits

limits::ChainPlan chain_plan(const ExperimentConfig& c) {
  limits::ChainPlan plan;
  plan.grid_intervals = as_int(c, "grid_intervals");
  plan.chains = as_int(c, "chains");
  plan.burn_in = c.get_int("burn_in");
  plan.thin = c.get_int("thin");
  return plan;
}

Json limit_record(const std::string& limit, const std::string& regime, double L, const stats::KSReport& ks) {
  Json j;
  j["limit"] = limit;
  j["regime"] = regime;
  j["L"] = L;
  j["ks_stat"] = ks.statistic;
  j["threshold"] = ks.threshold.value;
  j["threshold_kind"] = ks.threshold.kind == stats::KSThreshold::Kind::level ? "level" : "max_statistic";
  j["p_approx"] = ks.p_approx ? number(*ks.p_approx) : Json(nullptr);
  j["verdict"] = verdict_text(ks.verdict);
  return j;
}

Report soft_barrier_limit(const ExperimentConfig& c) {
  limits::WconvConfig wc;
  wc.A = c.get_double("A");
  wc.a = c.get_double("a");
  wc.alpha = c.get_double("alpha");
  wc.L_list = c.get_list("L_list");
  wc.samples = as_int(c, "samples");
  wc.chain = chain_plan(c);
  wc.ks_cap = c.get_double("ks_cap");
  wc.b0_mean_cap = c.get_double("b0_mean_cap");
  wc.seed = c.get_u64("seed");
  const auto r = limits::verify_wconv(wc);

  Report report;
  Json levels = Json::array();
  Table table{"levels",
              {"L", "ks_stat", "threshold", "b0_mean", "b0_standard_error", "acceptance_rate", "mixing_warning",
               "finite_L_distance", "ks_finite_L", "p_finite_L"},
              {}};
  for (const auto& lv : r.levels) {
    Json rec = limit_record("positive-bridge", "single-path", lv.L, lv.ks);
    rec["b0_mean"] = lv.b0_mean;
    rec["b0_standard_error"] = lv.b0_standard_error;
    rec["acceptance_rate"] = lv.acceptance_rate;
    rec["mixing_warning"] = lv.mixing_warning;
    rec["finite_L_distance"] = lv.finite_L_distance ? Json(*lv.finite_L_distance) : Json(nullptr);
    rec["ks_vs_finite_L"] = lv.ks_finite_L ? to_json(*lv.ks_finite_L) : Json(nullptr);
    levels.push_back(rec);
    table.add_row({cell(lv.L), cell(lv.ks.statistic), cell(lv.ks.threshold.value), cell(lv.b0_mean),
                   cell(lv.b0_standard_error), cell(lv.acceptance_rate), lv.mixing_warning ? "1" : "0",
                   lv.finite_L_distance ? cell(*lv.finite_L_distance) : "",
                   lv.ks_finite_L ? cell(lv.ks_finite_L->statistic) : "",
                   lv.ks_finite_L && lv.ks_finite_L->p_approx ? cell(*lv.ks_finite_L->p_approx) : ""});
    Table samples{"samples_L" + format_double(lv.L), {"replica", "curve", "x", "value", "log_weight"}, {}};
    for (std::size_t i = 0; i < lv.marginal.size(); ++i)
      samples.add_row({cell(static_cast<long long>(i)), "1", cell(0.5 * wc.A), cell(lv.marginal[i]), "0"});
    for (std::size_t i = 0; i < lv.b0.size(); ++i)
      samples.add_row({cell(static_cast<long long>(i)), "1", "0", cell(lv.b0[i]), "0"});
    report.tables.push_back(samples);
  }
  const auto& last = r.levels.back();
  Check check{"soft-barrier-limit", r.verdict, {}};
  check.detail["levels"] = levels;
  check.detail["ks_decreasing"] = r.ks_decreasing;
  check.detail["ks_cap"] = wc.ks_cap;
  check.detail["b0_mean_at_largest_L"] = last.b0_mean;
  check.detail["b0_mean_cap"] = wc.b0_mean_cap;
  report.checks.push_back(check);
  report.tables.insert(report.tables.begin(), table);
  return report;
}

Report multipath_limit(const ExperimentConfig& c, limits::Regime regime) {
  limits::MultipathConfig mc;
  mc.regime = regime;
  mc.A = c.get_double("A");
  mc.starts = c.get_list("starts");
  mc.alpha = c.get_double("alpha");
  mc.mu = c.get_double("mu");
  mc.floor = c.get_double("floor");
  mc.L_list = c.get_list("L_list");
  mc.samples = as_int(c, "samples");
  mc.chain = chain_plan(c);
  mc.limit_grid_intervals = as_int(c, "limit_grid_intervals");
  mc.level = c.get_double("level");
  mc.gap_floor = c.get_double("gap_floor");
  mc.seed = c.get_u64("seed");
  const auto r = limits::verify_multipath_limit(mc);
  const std::string regime_name(limits::to_string(regime));
  const std::string limit = regime == limits::Regime::supercritical ? "pinned-pairs" : "non-intersecting-drifted-bm";

  Report report;
  Json levels = Json::array();
  Table table{"levels",
              {"L", "curve1_ks", "curve1_p", "gap_ks", "gap_p", "median_terminal_gap", "acceptance_rate",
               "mixing_warning", "gap_finite_L_distance", "curve1_finite_L_distance"},
              {}};
  for (const auto& lv : r.levels) {
    Json rec;
    rec["L"] = lv.L;
    rec["curve1"] = limit_record(limit, regime_name, lv.L, lv.curve1);
    rec["gap"] = limit_record(limit, regime_name, lv.L, lv.gap);
    rec["median_terminal_gap"] = lv.median_terminal_gap;
    rec["acceptance_rate"] = lv.acceptance_rate;
    rec["mixing_warning"] = lv.mixing_warning;
    rec["gap_finite_L_distance"] = lv.gap_finite_L_distance ? Json(*lv.gap_finite_L_distance) : Json(nullptr);
    rec["gap_ks_vs_finite_L"] = lv.gap_ks_finite_L ? to_json(*lv.gap_ks_finite_L) : Json(nullptr);
    rec["curve1_finite_L_distance"] = lv.curve1_finite_L_distance ? Json(*lv.curve1_finite_L_distance) : Json(nullptr);
    rec["curve1_ks_vs_finite_L"] = lv.curve1_ks_finite_L ? to_json(*lv.curve1_ks_finite_L) : Json(nullptr);
    levels.push_back(rec);
    auto p = [](const stats::KSReport& ks) { return ks.p_approx ? cell(*ks.p_approx) : std::string(); };
    table.add_row({cell(lv.L), cell(lv.curve1.statistic), p(lv.curve1), cell(lv.gap.statistic), p(lv.gap),
                   cell(lv.median_terminal_gap), cell(lv.acceptance_rate), lv.mixing_warning ? "1" : "0",
                   lv.gap_finite_L_distance ? cell(*lv.gap_finite_L_distance) : "",
                   lv.curve1_finite_L_distance ? cell(*lv.curve1_finite_L_distance) : ""});
  }
  Check check{"multipath-limit-" + regime_name, r.verdict, {}};
  check.detail["levels"] = levels;
  check.detail["limit_median_terminal_gap"] = r.limit_median_terminal_gap;
  check.detail["limit_acceptance_rate"] = r.limit_acceptance_rate;
  if (regime == limits::Regime::supercritical) check.detail["terminal_gap_decreasing"] = r.trend_ok;
  else check.detail["terminal_gap_above_floor"] = r.contrast_ok;
  report.checks.push_back(check);
  report.tables.push_back(table);
  return report;
}

Report bridge_tail(const ExperimentConfig& c) {
  const auto Ts = c.get_list("T_list"), Ms = c.get_list("M_list");
  if (Ts.size() != Ms.size() || Ts.empty()) throw ConfigError("bridge-tail: T_list and M_list need equal nonzero length");
  const auto samples = c.get_u64("samples");
  const int intervals = as_int(c, "intervals");
  const std::uint64_t seed = c.get_u64("seed");
  Report report;
  Table table{"tail", {"T", "M", "frequency", "standard_error", "theory", "allowance"}, {}};
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    // each pair gets its own seed block so the pairs are independent
    const auto e = limits::bridge_min_tail_mc(seed + 1000003ULL * i, Ts[i], Ms[i], samples, intervals);
    Check check{"bridge-tail-T" + format_double(e.T) + "-M" + format_double(e.M), verdict_of(e.within_tolerance), {}};
    check.detail["T"] = e.T;
    check.detail["M"] = e.M;
    check.detail["samples"] = e.samples;
    check.detail["intervals"] = e.intervals;
    check.detail["frequency"] = e.frequency;
    check.detail["standard_error"] = e.standard_error;
    check.detail["theory"] = e.theory;
    check.detail["allowance"] = e.allowance;
    report.checks.push_back(check);
    table.add_row({cell(e.T), cell(e.M), cell(e.frequency), cell(e.standard_error), cell(e.theory), cell(e.allowance)});
  }
  report.tables.push_back(table);
  return report;
}

// ---------------------------------------------------------------- registry

Defaults chain_defaults(const limits::ChainPlan& p) {
  return {{"grid_intervals", std::to_string(p.grid_intervals)},
          {"chains", std::to_string(p.chains)},
          {"burn_in", std::to_string(p.burn_in)},
          {"thin", std::to_string(p.thin)}};
}

Defaults with_common(Defaults d, const std::string& name) {
  d.emplace("seed", "1");
  d.emplace("workers", "0");
  d.emplace("out", "results/" + name);
  return d;
}

Defaults multipath_defaults() {
  limits::MultipathConfig mc;
  Defaults d{{"A", format_double(mc.A)},
             {"starts", list_text(mc.starts)},
             {"alpha", format_double(mc.alpha)},
             {"mu", format_double(mc.mu)},
             {"floor", format_double(mc.floor)},
             {"L_list", list_text(mc.L_list)},
             {"samples", std::to_string(mc.samples)},
             {"limit_grid_intervals", std::to_string(mc.limit_grid_intervals)},
             {"level", format_double(mc.level)},
             {"gap_floor", format_double(mc.gap_floor)}};
  d.merge(chain_defaults(mc.chain));
  return d;
}

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  auto add = [&](std::string name, std::string summary, Defaults d) {
    r.push_back({name, std::move(summary), with_common(std::move(d), name)});
  };
  add("sym-identity", "ln 2 + log Z_sym^(1) equals log Z on every octant point",
      {{"n", "8"}, {"environments", "100"}, {"theta", "2"}, {"alpha", "0.5"}, {"threshold", "1e-10"}});
  add("row-decomposition", "first-row decomposition of the perturbed full-space partition function",
      {{"m", "5"}, {"n", "4"}, {"environments", "100"}, {"theta", "2"}, {"alpha", "0.5"}, {"threshold", "1e-9"}});
  add("bw-identity", "full-space log Z against the half-space anti-diagonal sum, two-sample KS",
      {{"m", "4"}, {"n", "3"}, {"theta", "2"}, {"alpha", "0.5"}, {"replicas", "10000"}, {"level", "0.01"}});
  {
    gibbs::ResampleConfig rc;
    add("gibbs-resample", "resampling invariance of the scaled line ensemble plus a wrong-floor control",
        {{"N", std::to_string(rc.N)},
         {"t", format_double(rc.t)},
         {"k", std::to_string(rc.k)},
         {"window_left", format_double(rc.window_left)},
         {"alpha", format_double(rc.alpha)},
         {"replicas", std::to_string(rc.replicas)},
         {"imh_steps", std::to_string(rc.imh_steps)},
         {"convention", "ensemble"},
         {"ess_floor", format_double(rc.ess_floor)},
         {"level", format_double(rc.level)}});
  }
  add("monotone-coupling", "coupled Glauber chains stay ordered in the start, beta and kappa cases",
      {{"steps", "100000"},
       {"N", "64"},
       {"L", "25"},
       {"A", "-1"},
       {"a", "0.5"},
       {"beta", "1"},
       {"kappa", "0"},
       {"epsilon", "inf"},
       {"diffusion", "1"},
       {"start_shift", "0.5"},
       {"beta_shift", "1"},
       {"kappa_shift", "0.5"}});
  add("kernels-suite", "heat, Robin, meander and positive-bridge kernel identities by quadrature",
      {{"alphas", "0.25,0.5,1,2"},
       {"times", "0.25,1,2.5"},
       {"starts", "0,0.3,1,2"},
       {"A", "-1"},
       {"a", "1"},
       {"fd_step", "0.001"},
       {"normalization_tol", "1e-6"},
       {"ck_tol", "1e-5"},
       {"bc_tol", "1e-4"},
       {"sandwich_max", "10"},
       {"sandwich_step", "0.5"},
       {"sandwich_times", "0.1,0.25,0.5,1"}});
  {
    limits::WconvConfig wc;
    Defaults d{{"A", format_double(wc.A)},
               {"a", format_double(wc.a)},
               {"alpha", format_double(wc.alpha)},
               {"L_list", list_text(wc.L_list)},
               {"samples", std::to_string(wc.samples)},
               {"ks_cap", format_double(wc.ks_cap)},
               {"b0_mean_cap", format_double(wc.b0_mean_cap)}};
    d.merge(chain_defaults(wc.chain));
    add("soft-barrier-limit", "soft-barrier path against the positive Brownian bridge as L grows", d);
  }
  add("multipath-limit-supercritical", "two-curve Gibbs measure against pinned pairs as L grows",
      multipath_defaults());
  add("multipath-limit-critical", "two-curve Gibbs measure with alpha = mu / sqrt(L) against non-intersecting BMs",
      multipath_defaults());
  add("bridge-tail", "minimum of discretized Brownian bridges against exp(-2 M^2 / T)",
      {{"T_list", "1,1,2"}, {"M_list", "0.5,1,1"}, {"samples", "100000"}, {"intervals", "1024"}});
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.name;
  throw UsageError("unknown experiment '" + name + "' (known: " + known + ")");
}

ExperimentConfig default_config(const std::string& name) {
  const auto& info = find_experiment(name);
  return {info.name, info.defaults};
}

ExperimentConfig resolve(const ExperimentConfig& config) {
  auto out = default_config(config.experiment);
  for (const auto& [k, v] : config.values) {
    if (!out.has(k)) throw UsageError("experiment '" + config.experiment + "' has no parameter '" + k + "'");
    out.values[k] = v;
  }
  return out;
}

Report execute(const ExperimentConfig& config) {
  const auto workers = config.get_int("workers");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  set_worker_count(static_cast<int>(workers));
  Report report;
  const auto& name = config.experiment;
  if (name == "sym-identity") report = sym_identity(config);
  else if (name == "row-decomposition") report = row_decomposition(config);
  else if (name == "bw-identity") report = bw_identity(config);
  else if (name == "gibbs-resample") report = gibbs_resample(config);
  else if (name == "monotone-coupling") report = monotone_coupling(config);
  else if (name == "kernels-suite") report = kernels_suite(config);
  else if (name == "soft-barrier-limit") report = soft_barrier_limit(config);
  else if (name == "multipath-limit-supercritical") report = multipath_limit(config, limits::Regime::supercritical);
  else if (name == "multipath-limit-critical") report = multipath_limit(config, limits::Regime::critical);
  else if (name == "bridge-tail") report = bridge_tail(config);
  else throw UsageError("unknown experiment '" + name + "'");
  report.config = config;
  return report;
}

int run(const ExperimentConfig& config) {
  const auto resolved = resolve(config);
  const auto report = execute(resolved);
  write_report(report, resolved.get("out"));
  return exit_status(report.overall());
}

}  // namespace hslg::lab
