#include "hslg/polymer.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hslg/errors.hpp"
#include "hslg/stats.hpp"

namespace hslg::polymer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using stats::log_add_exp;

std::string site_str(int m, int n) { return "(" + std::to_string(m) + "," + std::to_string(n) + ")"; }

}  // namespace

HalfPartitionTable::HalfPartitionTable(const EnvHalfSpace& env)
    : n_max_(env.n_max()), values_(static_cast<std::size_t>(env.n_max() + 1) * (env.n_max() + 1), kNegInf) {
  const auto at = [this](int i, int j) -> double& { return values_[static_cast<std::size_t>(i) * (n_max_ + 1) + j]; };
  for (int i = 1; i <= n_max_; ++i) {
    for (int j = 1; j <= i; ++j) {
      if (i == 1 && j == 1) {
        at(1, 1) = env.log_w(1, 1);
        continue;
      }
      const double from_below = (j <= i - 1) ? at(i - 1, j) : kNegInf;
      const double from_left = (j >= 2) ? at(i, j - 1) : kNegInf;
      at(i, j) = env.log_w(i, j) + log_add_exp(from_below, from_left);
    }
  }
}

double HalfPartitionTable::log_z(int m, int n) const {
  HSLG_REQUIRE(n >= 1 && n <= m && m <= n_max_, DomainError, "log_Z_half: " + site_str(m, n) + " outside the octant");
  return values_[static_cast<std::size_t>(m) * (n_max_ + 1) + n];
}

double log_Z_half(const EnvHalfSpace& env, int m, int n) {
  HSLG_REQUIRE(n >= 1 && n <= m && m <= env.n_max(), DomainError,
               "log_Z_half: " + site_str(m, n) + " outside the octant");
  return HalfPartitionTable(env).log_z(m, n);
}

SymPartitionTable::SymPartitionTable(const SymmetrizedView& env, int r, int m_max, int q_max)
    : r_(r), m_max_(m_max), q_max_(q_max) {
  HSLG_REQUIRE(r >= 1, DomainError, "Z_sym table needs r >= 1");
  if (r > kMaxSymPaths) throw UnsupportedError("Z_sym^(r) is only implemented for r <= 3");
  HSLG_REQUIRE(q_max >= r, DomainError, "Z_sym^(r)(m,n) requires n >= r");
  HSLG_REQUIRE(m_max >= 1 && m_max <= env.n_max() && q_max <= env.n_max(), DomainError,
               "Z_sym table exceeds the environment");

  const int H = q_max;
  const int base = H + 1;
  std::size_t state_count = 1;
  for (int k = 0; k < r; ++k) state_count *= static_cast<std::size_t>(base);

  const auto encode = [&](const std::array<int, kMaxSymPaths>& h) {
    std::size_t idx = 0;
    for (int k = r - 1; k >= 0; --k) idx = idx * base + static_cast<std::size_t>(h[k]);
    return idx;
  };
  const auto decode = [&](std::size_t idx) {
    std::array<int, kMaxSymPaths> h{};
    for (int k = 0; k < r; ++k) {
      h[k] = static_cast<int>(idx % base);
      idx /= base;
    }
    return h;
  };

  // Entry heights into column 1 are the starting points (1,r), ..., (1,1).
  std::vector<double> entry(state_count, kNegInf), exit(state_count, kNegInf);
  std::array<int, kMaxSymPaths> start{};
  for (int k = 0; k < r; ++k) start[k] = r - k;
  entry[encode(start)] = 0.0;

  values_.assign(static_cast<std::size_t>(m_max + 1) * (q_max + 1), kNegInf);
  std::vector<double> prefix(H + 1, 0.0);

  for (int col = 1; col <= m_max; ++col) {
    for (int j = 1; j <= H; ++j) prefix[j] = prefix[j - 1] + env.log_w(col, j);
    std::fill(exit.begin(), exit.end(), kNegInf);

    for (std::size_t idx = 0; idx < state_count; ++idx) {
      const double v = entry[idx];
      if (v == kNegInf) continue;
      const auto h = decode(idx);
      std::array<int, kMaxSymPaths> e{};
      // Path k climbs column `col` from h[k] to e[k]; the path below must
      // leave the column strictly under h[k] (vertex-disjointness).
      const auto recurse = [&](auto&& self, int k, double acc) -> void {
        if (k == r) {
          double& slot = exit[encode(e)];
          slot = log_add_exp(slot, acc);
          return;
        }
        const int hi = (k == 0) ? H : h[k - 1] - 1;
        for (int top = h[k]; top <= hi; ++top) {
          e[k] = top;
          self(self, k + 1, acc + prefix[top] - prefix[h[k] - 1]);
        }
      };
      recurse(recurse, 0, v);
    }

    for (int q = r; q <= q_max; ++q) {
      std::array<int, kMaxSymPaths> target{};
      for (int k = 0; k < r; ++k) target[k] = q - k;
      values_[static_cast<std::size_t>(col) * (q_max + 1) + q] = exit[encode(target)];
    }
    std::swap(entry, exit);
  }
}

double SymPartitionTable::log_z(int p, int q) const {
  HSLG_REQUIRE(p >= 1 && p <= m_max_ && q >= r_ && q <= q_max_, DomainError,
               "Z_sym table lookup " + site_str(p, q) + " out of range");
  return values_[static_cast<std::size_t>(p) * (q_max_ + 1) + q];
}

double log_Z_sym(const SymmetrizedView& env, int r, int m, int n) {
  HSLG_REQUIRE(r >= 0, DomainError, "r must be nonnegative");
  if (r == 0) return 0.0;
  HSLG_REQUIRE(r <= n, DomainError, "Z_sym^(r)(m,n) requires r <= n");
  if (r > kMaxSymPaths) throw UnsupportedError("Z_sym^(r) is only implemented for r <= 3");
  HSLG_REQUIRE(m >= 1 && m <= env.n_max() && n <= env.n_max(), DomainError,
               "log_Z_sym: " + site_str(m, n) + " outside the lattice");
  return SymPartitionTable(env, r, m, n).log_z(m, n);
}

double LineEnsemble::value(int i, int j) const {
  HSLG_REQUIRE(i >= 1 && i <= curve_count() && j >= 1 && j <= curve_length(i), RangeError,
               "line ensemble index " + site_str(i, j) + " out of range");
  return curves[i - 1][j - 1];
}

LineEnsemble hslg_line_ensemble(const EnvHalfSpace& env, int n, int curve_count) {
  HSLG_REQUIRE(n >= 1, DomainError, "line ensemble size must be positive");
  if (curve_count <= 0) curve_count = std::min(n, kMaxSymPaths);
  HSLG_REQUIRE(curve_count <= n, DomainError, "more curves requested than the ensemble has");
  if (curve_count > kMaxSymPaths) throw UnsupportedError("curves beyond the third need Z_sym^(r) with r > 3");
  HSLG_REQUIRE(env.n_max() >= 2 * n, DomainError,
               "lattice too small: line ensemble of size n needs n_max >= 2n");

  const SymmetrizedView sym(env);
  std::vector<SymPartitionTable> tables;
  for (int r = 1; r <= curve_count; ++r) tables.emplace_back(sym, r, 2 * n, n);

  LineEnsemble out;
  out.n = n;
  out.theta = env.theta();
  out.alpha = env.alpha();
  out.curves.resize(curve_count);
  const double ln2 = std::log(2.0);
  for (int i = 1; i <= curve_count; ++i) {
    auto& curve = out.curves[i - 1];
    curve.resize(out.curve_length(i));
    for (int j = 1; j <= out.curve_length(i); ++j) {
      const int p = n + j / 2;
      const int q = n - (j + 1) / 2 + 1;
      const double upper = tables[i - 1].log_z(p, q);
      const double lower = (i == 1) ? 0.0 : tables[i - 2].log_z(p, q);
      curve[j - 1] = ln2 + upper - lower;
    }
  }
  return out;
}

double ScaledCurve::value_at(double x) const {
  HSLG_REQUIRE(!values.empty(), RangeError, "empty curve");
  const double pos = -x / step;
  const double last = static_cast<double>(values.size() - 1);
  // tolerate rounding at the grid ends
  HSLG_REQUIRE(pos >= -1e-9 && pos <= last + 1e-9, RangeError, "x outside the curve domain");
  const double clamped = std::clamp(pos, 0.0, last);
  const auto k = std::min(static_cast<std::size_t>(std::floor(clamped)), values.size() - 1);
  if (k + 1 >= values.size()) return values[k];
  const double frac = clamped - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

int ensemble_size_for(int N, double t) { return static_cast<int>(std::floor(N * t / 2.0)) + 1; }

double theta_for_scale(int N) { return 0.5 + std::sqrt(static_cast<double>(N)); }

ScaledEnsemble scaled_ensemble(const LineEnsemble& ensemble, int N, double t) {
  HSLG_REQUIRE(N >= 1 && t >= 1.0, DomainError, "scaled ensemble needs N >= 1 and t >= 1");
  const int half = static_cast<int>(std::floor(N * t / 2.0));
  HSLG_REQUIRE(ensemble.n == half + 1, ContractError, "line ensemble size must equal floor(Nt/2) + 1");
  HSLG_REQUIRE(std::abs(ensemble.theta - theta_for_scale(N)) < 1e-12, ContractError,
               "line ensemble theta must equal 1/2 + sqrt(N)");

  ScaledEnsemble out;
  out.N = N;
  out.t = t;
  const double logN = std::log(static_cast<double>(N));
  for (int i = 1; i <= ensemble.curve_count(); ++i) {
    ScaledCurve c;
    c.step = 1.0 / std::sqrt(static_cast<double>(N));
    c.values.resize(ensemble.curve_length(i));
    for (std::size_t k = 0; k < c.values.size(); ++k) {
      // x sqrt(N) = -k
      const int odd = static_cast<int>(k % 2);
      c.values[k] = ensemble.curves[i - 1][k] + 0.5 * (2.0 * half + i + 1 + odd) * logN;
    }
    out.curves.push_back(std::move(c));
  }
  return out;
}

Curve rescale_123(Curve curve, double t) {
  HSLG_REQUIRE(t > 0.0, DomainError, "rescale_123 needs t > 0");
  const double t13 = std::cbrt(t), t23 = t13 * t13;
  return [curve = std::move(curve), t, t13, t23](double x) { return (curve(x * t23) + t / 24.0) / t13; };
}

Curve unrescale_123(Curve curve, double t) {
  HSLG_REQUIRE(t > 0.0, DomainError, "unrescale_123 needs t > 0");
  const double t13 = std::cbrt(t), t23 = t13 * t13;
  return [curve = std::move(curve), t, t13, t23](double y) { return t13 * curve(y / t23) - t / 24.0; };
}

double log_Z_full_from(const EnvFullPerturbed& env, Site start, Site end) {
  HSLG_REQUIRE(start.i >= 1 && start.j >= 1 && end.i <= env.m_max() && end.j <= env.n_max(), DomainError,
               "log_Z_full_from: endpoints outside the lattice");
  HSLG_REQUIRE(start.i <= end.i && start.j <= end.j, DomainError, "start must be <= end componentwise");
  const int rows = end.i - start.i + 1, cols = end.j - start.j + 1;
  std::vector<double> z(static_cast<std::size_t>(rows) * cols, kNegInf);
  for (int a = 0; a < rows; ++a) {
    for (int b = 0; b < cols; ++b) {
      const double w = env.log_w(start.i + a, start.j + b);
      if (a == 0 && b == 0) {
        z[0] = w;
        continue;
      }
      const double below = a > 0 ? z[static_cast<std::size_t>(a - 1) * cols + b] : kNegInf;
      const double left = b > 0 ? z[static_cast<std::size_t>(a) * cols + b - 1] : kNegInf;
      z[static_cast<std::size_t>(a) * cols + b] = w + log_add_exp(below, left);
    }
  }
  return z.back();
}

double log_Z_full_perturbed(const EnvFullPerturbed& env, int m, int n) {
  HSLG_REQUIRE(m >= 1 && n >= 1 && m <= env.m_max() && n <= env.n_max(), DomainError,
               "log_Z_full_perturbed: " + site_str(m, n) + " outside the lattice");
  return log_Z_full_from(env, {1, 1}, {m, n});
}

double verify_row_decomposition(const EnvFullPerturbed& env, int m, int n) {
  const double direct = log_Z_full_perturbed(env, m, n);
  if (m == 1) return 0.0;
  std::vector<double> terms;
  terms.reserve(n);
  double first_row = 0.0;
  for (int k = 1; k <= n; ++k) {
    first_row += env.log_w(1, k);
    terms.push_back(first_row + log_Z_full_from(env, {2, k}, {m, n}));
  }
  return std::abs(direct - stats::log_sum_exp(terms));
}

std::pair<double, double> sample_bw_identity_pair(RngState& rng, double theta, double alpha, int m, int n) {
  HSLG_REQUIRE(n >= 1 && m >= n, DomainError, "Baik-Wang pair requires m >= n >= 1");
  RngState full_rng = rng.derive(1);
  RngState half_rng = rng.derive(2);
  const EnvFullPerturbed full = build_full_perturbed_env(full_rng, m, n, theta, alpha);
  const EnvHalfSpace half = build_half_env(half_rng, m + n - 1, theta, alpha);
  const HalfPartitionTable table(half);
  std::vector<double> terms;
  for (int r = m; r <= m + n - 1; ++r) terms.push_back(table.log_z(r, m + n - r));
  return {log_Z_full_perturbed(full, m, n), stats::log_sum_exp(terms)};
}

}  // namespace hslg::polymer
