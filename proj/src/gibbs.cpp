#include "hslg/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hslg/errors.hpp"
#include "hslg/stats.hpp"

namespace hslg::gibbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_odd(int g) { return (g % 2) != 0; }

int z_n_index(double x, int N) {
  const double scaled = x * std::sqrt(static_cast<double>(N));
  const double r = std::round(scaled);
  HSLG_REQUIRE(std::abs(scaled - r) < 1e-9, ContractError, "grid endpoint is not in Z_N");
  return static_cast<int>(r);
}

double lg_shape(int N, int g, double alpha) {
  const int idx = g + 1;
  return 0.5 + (is_odd(idx) ? -alpha : alpha) + std::sqrt(static_cast<double>(N));
}

// exp(lower - upper) with the conventions +inf ceiling / -inf floor -> 0.
double gap_term(double lower, double upper, double scale) {
  if (lower == -kInf || upper == kInf) return 0.0;
  const double v = std::exp(scale * (lower - upper));
  return std::isnan(v) ? 0.0 : v;
}

std::vector<std::vector<double>> with_boundaries(const Paths& paths, const GibbsSpec& spec) {
  const int M = spec.intervals();
  HSLG_REQUIRE(static_cast<int>(paths.size()) == spec.curve_count(), ContractError,
               "path count does not match the spec's curve range");
  std::vector<std::vector<double>> rows;
  rows.reserve(paths.size() + 2);
  std::vector<double> f(M + 1), g(M + 1);
  for (int m = 0; m <= M; ++m) {
    f[m] = spec.ceiling(spec.x_at(m));
    g[m] = spec.floor(spec.x_at(m));
  }
  rows.push_back(std::move(f));
  for (const auto& p : paths) {
    HSLG_REQUIRE(static_cast<int>(p.size()) == M + 1, ContractError, "path length does not match the spec grid");
    rows.push_back(p);
  }
  rows.push_back(std::move(g));
  return rows;
}

double curve_sign(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

int GibbsSpec::intervals() const {
  if (kind == Kind::discrete) {
    const int N = static_cast<int>(std::lround(scale));
    return z_n_index(A2, N) - z_n_index(A1, N);
  }
  return grid_intervals;
}

double GibbsSpec::step() const {
  if (kind == Kind::discrete) return 1.0 / std::sqrt(scale);
  return (A2 - A1) / grid_intervals;
}

void GibbsSpec::validate() const {
  HSLG_REQUIRE(k >= 1 && k <= ell, ContractError, "need 1 <= k <= ell");
  HSLG_REQUIRE(A1 < A2 && A2 <= 0.0, ContractError, "need A1 < A2 <= 0");
  HSLG_REQUIRE(side == Side::two_sided || A2 == 0.0, ContractError, "one-sided measures live on [A, 0]");
  HSLG_REQUIRE(static_cast<int>(left.size()) == curve_count(), ContractError, "left boundary data has wrong size");
  if (side == Side::two_sided)
    HSLG_REQUIRE(static_cast<int>(right.size()) == curve_count(), ContractError,
                 "right boundary data has wrong size");
  HSLG_REQUIRE(ceiling && floor, ContractError, "ceiling and floor must be set");
  if (kind == Kind::discrete) {
    HSLG_REQUIRE(scale >= 1.0 && std::abs(scale - std::round(scale)) < 1e-12, ContractError,
                 "discrete scale N must be a positive integer");
    const int N = static_cast<int>(std::lround(scale));
    z_n_index(A1, N);
    z_n_index(A2, N);
  } else {
    HSLG_REQUIRE(scale > 0.0, ContractError, "continuum scale L must be positive");
    HSLG_REQUIRE(grid_intervals >= 1, ContractError, "grid needs at least one interval");
  }
}

double lg_increment_log_density(int N, int g, double alpha, double d) {
  const double beta = lg_shape(N, g, alpha);
  const double x = (is_odd(g) ? -d : d) + 0.5 * std::log(static_cast<double>(N));
  return beta * x - std::exp(x);
}

std::vector<double> sample_lg_walk(RngState& rng, int N, double A1, double A2, double start, double alpha) {
  HSLG_REQUIRE(N >= 1, DomainError, "scale N must be positive");
  HSLG_REQUIRE(A1 <= A2, DomainError, "need A1 <= A2");
  const int g0 = z_n_index(A1, N), g1 = z_n_index(A2, N);
  const double log_sqrt_n = 0.5 * std::log(static_cast<double>(N));
  std::vector<double> out(static_cast<std::size_t>(g1 - g0) + 1);
  out[0] = start;
  for (int g = g0 + 1; g <= g1; ++g) {
    const double beta = lg_shape(N, g, alpha);
    HSLG_REQUIRE(beta > 0.0, DomainError, "log-gamma shape 1/2 +- alpha + sqrt(N) must be positive");
    const double x = rng.log_gamma_variate(beta) - log_sqrt_n;
    out[g - g0] = out[g - g0 - 1] + (is_odd(g) ? -x : x);
  }
  return out;
}

std::vector<double> sample_lg_bridge(RngState& rng, int N, double A1, double A2, double a, double b, double alpha,
                                     int sweeps) {
  auto walk = sample_lg_walk(rng, N, A1, A2, a, alpha);
  const int M = static_cast<int>(walk.size()) - 1;
  if (M == 0) {
    HSLG_REQUIRE(a == b, DomainError, "a zero-length bridge needs a == b");
    return walk;
  }
  const int g0 = z_n_index(A1, N);
  std::vector<double> inc(M);
  for (int m = 0; m < M; ++m) inc[m] = walk[m + 1] - walk[m];
  const double shift = (b - walk.back()) / M;
  for (auto& d : inc) d += shift;

  if (M >= 2) {
    const double sd = std::pow(static_cast<double>(N), -0.25);
    const long long moves = static_cast<long long>(sweeps) * M;
    for (long long s = 0; s < moves; ++s) {
      const int m1 = static_cast<int>(rng.uniform_index(M));
      int m2 = static_cast<int>(rng.uniform_index(M - 1));
      if (m2 >= m1) ++m2;
      const double delta = sd * rng.normal();
      const int ga = g0 + m1 + 1, gb = g0 + m2 + 1;
      const double before =
          lg_increment_log_density(N, ga, alpha, inc[m1]) + lg_increment_log_density(N, gb, alpha, inc[m2]);
      const double after = lg_increment_log_density(N, ga, alpha, inc[m1] + delta) +
                           lg_increment_log_density(N, gb, alpha, inc[m2] - delta);
      if (std::log(rng.uniform()) < after - before) {
        inc[m1] += delta;
        inc[m2] -= delta;
      }
    }
  }
  walk[0] = a;
  for (int m = 0; m < M; ++m) walk[m + 1] = walk[m] + inc[m];
  walk[M] = b;
  return walk;
}

std::vector<double> sample_bm(RngState& rng, int intervals, double h, double start, double drift) {
  std::vector<double> out(static_cast<std::size_t>(intervals) + 1);
  out[0] = start;
  const double sd = std::sqrt(h);
  for (int m = 1; m <= intervals; ++m) out[m] = out[m - 1] + drift * h + sd * rng.normal();
  return out;
}

std::vector<double> sample_brownian_bridge(RngState& rng, int intervals, double h, double a, double b) {
  auto path = sample_bm(rng, intervals, h, 0.0);
  const double end = path.back();
  for (int m = 0; m <= intervals; ++m) {
    const double s = static_cast<double>(m) / intervals;
    path[m] += a + s * (b - a - end);
  }
  path.back() = b;
  return path;
}

double discrete_walk_parameter(int i, double alpha, DiscreteConvention convention) {
  const double sign = curve_sign(i);
  return convention == DiscreteConvention::literal ? sign * alpha : -sign * alpha;
}

double log_W_discrete_rows(const std::vector<std::vector<double>>& rows, int N, int g0,
                           DiscreteConvention convention) {
  HSLG_REQUIRE(rows.size() >= 2, ContractError, "need at least a ceiling and a floor row");
  const std::size_t len = rows.front().size();
  for (const auto& r : rows) HSLG_REQUIRE(r.size() == len, ContractError, "rows must share the grid");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& upper = rows[i];
    const auto& lower = rows[i + 1];
    for (std::size_t m = 0; m < len; ++m) {
      if (is_odd(g0 + static_cast<int>(m)) != (convention == DiscreteConvention::ensemble)) continue;
      // neighbours outside [A1, A2] count as +infinity
      if (m >= 1) total += gap_term(lower[m], upper[m - 1], 1.0);
      if (m + 1 < len) total += gap_term(lower[m], upper[m + 1], 1.0);
    }
  }
  const double prefactor = convention == DiscreteConvention::literal ? 1.0 / std::sqrt(static_cast<double>(N))
                                                                     : 1.0 / static_cast<double>(N);
  return -total * prefactor;
}

double log_W_discrete(const Paths& paths, const GibbsSpec& spec) {
  HSLG_REQUIRE(spec.kind == Kind::discrete, ContractError, "log_W_discrete needs a discrete spec");
  spec.validate();
  const int N = static_cast<int>(std::lround(spec.scale));
  return log_W_discrete_rows(with_boundaries(paths, spec), N, z_n_index(spec.A1, N), spec.convention);
}

double log_W_continuum(const Paths& paths, const GibbsSpec& spec) {
  HSLG_REQUIRE(spec.kind == Kind::continuum, ContractError, "log_W_continuum needs a continuum spec");
  spec.validate();
  const auto rows = with_boundaries(paths, spec);
  const int M = spec.intervals();
  const double h = spec.step(), L = spec.scale, sqrtL = std::sqrt(L);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    for (int m = 0; m <= M; ++m) {
      const double w = (m == 0 || m == M) ? 0.5 * h : h;
      integral += w * gap_term(rows[i + 1][m], rows[i][m], sqrtL);
    }
  }
  double out = -L * integral;
  if (spec.side == Side::one_sided && spec.drift_folded) {
    for (int c = 0; c < spec.curve_count(); ++c)
      out += curve_sign(spec.k + c) * spec.alpha * sqrtL * paths[c][M];
  }
  return out;
}

double log_W(const Paths& paths, const GibbsSpec& spec) {
  return spec.kind == Kind::discrete ? log_W_discrete(paths, spec) : log_W_continuum(paths, spec);
}

Paths sample_free(RngState& rng, const GibbsSpec& spec) {
  spec.validate();
  Paths out;
  for (int c = 0; c < spec.curve_count(); ++c) {
    const int i = spec.k + c;
    const double param = curve_sign(i) * spec.alpha;
    if (spec.kind == Kind::discrete) {
      const double lg_param = discrete_walk_parameter(i, spec.alpha, spec.convention);
      const int N = static_cast<int>(std::lround(spec.scale));
      out.push_back(spec.side == Side::one_sided
                        ? sample_lg_walk(rng, N, spec.A1, spec.A2, spec.left[c], lg_param)
                        : sample_lg_bridge(rng, N, spec.A1, spec.A2, spec.left[c], spec.right[c], lg_param));
    } else if (spec.side == Side::one_sided) {
      const double drift = spec.drift_folded ? 0.0 : param * std::sqrt(spec.scale);
      out.push_back(sample_bm(rng, spec.intervals(), spec.step(), spec.left[c], drift));
    } else {
      out.push_back(sample_brownian_bridge(rng, spec.intervals(), spec.step(), spec.left[c], spec.right[c]));
    }
  }
  return out;
}

double WeightedSampleSet::weighted_mean(const std::function<double(const Paths&)>& fn) const {
  HSLG_REQUIRE(!samples.empty(), SamplingError, "empty sample set");
  const double norm = stats::log_sum_exp(log_weights);
  double acc = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) acc += std::exp(log_weights[s] - norm) * fn(samples[s]);
  return acc;
}

double WeightedSampleSet::weighted_standard_error(const std::function<double(const Paths&)>& fn) const {
  const double mu = weighted_mean(fn);
  const double norm = stats::log_sum_exp(log_weights);
  double acc = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double w = std::exp(log_weights[s] - norm);
    const double d = fn(samples[s]) - mu;
    acc += w * w * d * d;
  }
  return std::sqrt(acc);
}

WeightedSampleSet importance_sample_gibbs(RngState& rng, const GibbsSpec& spec, int M) {
  HSLG_REQUIRE(M >= 1, DomainError, "need at least one proposal");
  WeightedSampleSet out;
  out.samples.reserve(M);
  out.log_weights.reserve(M);
  for (int s = 0; s < M; ++s) {
    out.samples.push_back(sample_free(rng, spec));
    out.log_weights.push_back(log_W(out.samples.back(), spec));
  }
  const bool degenerate =
      std::all_of(out.log_weights.begin(), out.log_weights.end(), [](double w) { return w == -kInf; });
  if (degenerate) throw SamplingError("every importance weight is zero");
  out.ess = stats::ess(out.log_weights);
  return out;
}

namespace {

class ContinuumChain {
 public:
  ContinuumChain(const GibbsSpec& spec, Paths state)
      : spec_(spec),
        M_(spec.intervals()),
        C_(spec.curve_count()),
        h_(spec.step()),
        L_(spec.scale),
        sqrtL_(std::sqrt(spec.scale)),
        one_sided_(spec.side == Side::one_sided),
        state_(std::move(state)) {
    f_.resize(M_ + 1);
    g_.resize(M_ + 1);
    tw_.resize(M_ + 1);
    for (int m = 0; m <= M_; ++m) {
      f_[m] = spec.ceiling(spec.x_at(m));
      g_[m] = spec.floor(spec.x_at(m));
      tw_[m] = (m == 0 || m == M_) ? 0.5 * h_ : h_;
    }
    for (int c = 0; c < C_; ++c) drift_.push_back(curve_sign(spec.k + c) * spec.alpha * sqrtL_);
    last_free_ = one_sided_ ? M_ : M_ - 1;
  }

  const Paths& state() const { return state_; }
  int free_sites() const { return C_ * std::max(0, last_free_); }

  double local_energy(int c, int m, double v) const {
    const double above = (c == 0) ? f_[m] : state_[c - 1][m];
    const double below = (c == C_ - 1) ? g_[m] : state_[c + 1][m];
    double e = -L_ * tw_[m] * (gap_term(below, v, sqrtL_) + gap_term(v, above, sqrtL_));
    if (one_sided_ && m == M_) e += drift_[c] * v;
    return e;
  }

  bool local_move(RngState& rng, double scale) {
    if (last_free_ < 1) return false;
    const int c = static_cast<int>(rng.uniform_index(C_));
    const int m = 1 + static_cast<int>(rng.uniform_index(last_free_));
    auto& p = state_[c];
    const double v = p[m];
    const double nv = v + scale * rng.normal();
    double delta = local_energy(c, m, nv) - local_energy(c, m, v);
    const double left = p[m - 1];
    delta -= ((nv - left) * (nv - left) - (v - left) * (v - left)) / (2.0 * h_);
    if (m < M_) {
      const double right = p[m + 1];
      delta -= ((right - nv) * (right - nv) - (right - v) * (right - v)) / (2.0 * h_);
    }
    if (!(std::log(rng.uniform()) < delta)) return false;
    p[m] = nv;
    return true;
  }

  // Log-uniform segment length in [2, M].
  std::pair<int, int> random_segment(RngState& rng) const {
    int len = static_cast<int>(std::floor(std::exp(rng.uniform() * std::log(static_cast<double>(M_))))) + 1;
    len = std::clamp(len, 2, M_);
    const int m1 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(M_ - len + 1)));
    return {m1, m1 + len};
  }

  bool segment_move(RngState& rng) {
    if (M_ < 2) return false;
    const int c = static_cast<int>(rng.uniform_index(C_));
    const auto [m1, m2] = random_segment(rng);
    const int len = m2 - m1;
    auto& p = state_[c];
    const bool free_end = one_sided_ && m2 == M_;
    const auto proposal = free_end ? sample_bm(rng, len, h_, p[m1])
                                   : sample_brownian_bridge(rng, len, h_, p[m1], p[m2]);
    const int hi = free_end ? m2 : m2 - 1;
    double delta = 0.0;
    for (int m = m1 + 1; m <= hi; ++m) delta += local_energy(c, m, proposal[m - m1]) - local_energy(c, m, p[m]);
    if (!(std::log(rng.uniform()) < delta)) return false;
    for (int m = m1 + 1; m <= hi; ++m) p[m] = proposal[m - m1];
    return true;
  }

  // Crank-Nicolson step for the curve average on a segment against its
  // Brownian prior (diffusion 1/C); the gaps between curves do not change.
  bool common_move(RngState& rng, double rho) {
    if (M_ < 2 || C_ < 2) return false;
    const auto [m1, m2] = random_segment(rng);
    const int len = m2 - m1;
    const bool free_end = one_sided_ && m2 == M_;
    const int hi = free_end ? m2 : m2 - 1;
    const auto noise = free_end ? sample_bm(rng, len, h_ / C_, 0.0) : sample_brownian_bridge(rng, len, h_ / C_, 0.0, 0.0);
    const double sigma = std::sqrt(1.0 - rho * rho);
    std::vector<double> shift(static_cast<std::size_t>(len) + 1, 0.0);
    auto mean_at = [&](int m) {
      double acc = 0.0;
      for (int c = 0; c < C_; ++c) acc += state_[c][m];
      return acc / C_;
    };
    const double start = mean_at(m1), end = mean_at(m2);
    for (int m = m1 + 1; m <= hi; ++m) {
      const double s = static_cast<double>(m - m1) / len;
      const double ref = free_end ? start : start + s * (end - start);
      const double mean = mean_at(m);
      shift[m - m1] = rho * (mean - ref) + sigma * noise[m - m1] + ref - mean;
    }
    const double before = segment_energy(m1 + 1, hi);
    for (int c = 0; c < C_; ++c)
      for (int m = m1 + 1; m <= hi; ++m) state_[c][m] += shift[m - m1];
    const double delta = segment_energy(m1 + 1, hi) - before;
    if (std::log(rng.uniform()) < delta) return true;
    for (int c = 0; c < C_; ++c)
      for (int m = m1 + 1; m <= hi; ++m) state_[c][m] -= shift[m - m1];
    return false;
  }

 private:
  double segment_energy(int lo, int hi) const {
    double e = 0.0;
    for (int m = lo; m <= hi; ++m) {
      double gaps = gap_term(state_[0][m], f_[m], sqrtL_) + gap_term(g_[m], state_[C_ - 1][m], sqrtL_);
      for (int c = 0; c + 1 < C_; ++c) gaps += gap_term(state_[c + 1][m], state_[c][m], sqrtL_);
      e -= L_ * tw_[m] * gaps;
      if (one_sided_ && m == M_)
        for (int c = 0; c < C_; ++c) e += drift_[c] * state_[c][m];
    }
    return e;
  }

  const GibbsSpec& spec_;
  int M_, C_;
  double h_, L_, sqrtL_;
  bool one_sided_;
  int last_free_ = 0;
  Paths state_;
  std::vector<double> f_, g_, tw_, drift_;
};

}  // namespace

ChainResult metropolis_chain(RngState& rng, const GibbsSpec& spec, const ChainConfig& config,
                             const Observable& observe, const Paths* initial) {
  spec.validate();
  if (spec.kind != Kind::continuum) throw UnsupportedError("metropolis_chain runs on continuum specs");
  HSLG_REQUIRE(config.steps >= 1 && config.thin >= 1 && config.burn_in >= 0, DomainError,
               "chain needs steps >= 1, thin >= 1, burn_in >= 0");
  GibbsSpec folded = spec;
  folded.drift_folded = true;

  Paths start = initial ? *initial : sample_free(rng, folded);
  for (int c = 0; c < folded.curve_count(); ++c) {
    start[c].front() = folded.left[c];
    if (folded.side == Side::two_sided) start[c].back() = folded.right[c];
  }
  ContinuumChain chain(folded, std::move(start));

  ChainResult out;
  double scale = config.initial_scale > 0.0 ? config.initial_scale : std::sqrt(folded.step());
  long long batch_tries = 0, batch_accepts = 0, accepts = 0, tries = 0, streak = 0;
  const long long window = std::max(1000, 10 * chain.free_sites());
  const long long total = config.burn_in + config.steps;
  const bool multi = folded.curve_count() > 1;
  static constexpr double kCommonRho[3] = {0.0, 0.6, 0.9};

  for (long long s = 0; s < total; ++s) {
    const double u = rng.uniform();
    const bool local = u < config.local_fraction;
    bool accepted = false;
    if (local) {
      accepted = chain.local_move(rng, scale);
    } else if (multi && u < config.local_fraction + config.common_fraction) {
      accepted = chain.common_move(rng, kCommonRho[rng.uniform_index(3)]);
    } else {
      accepted = chain.segment_move(rng);
    }
    streak = accepted ? 0 : streak + 1;
    if (streak >= window) out.mixing_warning = true;
    if (s < config.burn_in) {
      if (local) {
        ++batch_tries;
        batch_accepts += accepted;
        if (batch_tries == 200) {
          const double rate = static_cast<double>(batch_accepts) / batch_tries;
          scale *= std::exp(rate - config.target_acceptance);
          batch_tries = batch_accepts = 0;
        }
      }
      continue;
    }
    ++tries;
    accepts += accepted;
    if ((s - config.burn_in + 1) % config.thin == 0) out.observations.push_back(observe(chain.state()));
  }
  out.acceptance_rate = tries > 0 ? static_cast<double>(accepts) / tries : 0.0;
  out.local_scale = scale;
  return out;
}

WeightedSampleSet metropolis_chain(RngState& rng, const GibbsSpec& spec, const ChainConfig& config) {
  WeightedSampleSet out;
  std::vector<Paths> kept;
  const auto result = metropolis_chain(rng, spec, config, [&kept](const Paths& p) {
    kept.push_back(p);
    return std::vector<double>{};
  });
  out.samples = std::move(kept);
  out.log_weights.assign(out.samples.size(), 0.0);
  out.ess = static_cast<double>(out.samples.size());
  out.acceptance_rate = result.acceptance_rate;
  return out;
}

}  // namespace hslg::gibbs
