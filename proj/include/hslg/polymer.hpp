#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hslg/environment.hpp"
#include "hslg/rng.hpp"

namespace hslg::polymer {

/// Largest number of non-intersecting paths the column transfer supports.
inline constexpr int kMaxSymPaths = 3;

/// log Z(i,j) for every octant site, from one pass of the recursion
/// log Z(i,j) = log w(i,j) + logaddexp(log Z(i-1,j), log Z(i,j-1)).
class HalfPartitionTable {
 public:
  explicit HalfPartitionTable(const EnvHalfSpace& env);
  double log_z(int m, int n) const;
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<double> values_;
};

double log_Z_half(const EnvHalfSpace& env, int m, int n);

/// log Z_sym^(r)(p,q) for all 1 <= p <= m_max and r <= q <= q_max, computed by
/// one column-by-column transfer over strictly decreasing r-tuples of heights.
class SymPartitionTable {
 public:
  SymPartitionTable(const SymmetrizedView& env, int r, int m_max, int q_max);
  double log_z(int p, int q) const;
  int r() const { return r_; }

 private:
  int r_, m_max_, q_max_;
  std::vector<double> values_;
};

/// log Z_sym^(r)(m,n); r = 0 returns 0 (Z_sym^(0) = 1).
double log_Z_sym(const SymmetrizedView& env, int r, int m, int n);

/// L_i(j) for i in [1, curve_count], j in [1, 2n - 2i + 2].
struct LineEnsemble {
  int n = 0;
  double theta = 0.0;
  double alpha = 0.0;
  std::vector<std::vector<double>> curves;  // curves[i-1][j-1]

  int curve_count() const { return static_cast<int>(curves.size()); }
  int curve_length(int i) const { return 2 * n - 2 * i + 2; }
  double value(int i, int j) const;
};

/// Builds the first `curve_count` curves (default min(n, 3)) of the line
/// ensemble L_i(j) = log 2 + log Z_sym^(i)(p,q) - log Z_sym^(i-1)(p,q) with
/// p = n + floor(j/2), q = n - ceil(j/2) + 1. Requires env.n_max() >= 2n.
LineEnsemble hslg_line_ensemble(const EnvHalfSpace& env, int n, int curve_count = 0);

/// A curve sampled at x_k = -k * step (k = 0, 1, ...), linear in between.
struct ScaledCurve {
  double step = 1.0;
  std::vector<double> values;

  double x_at(std::size_t k) const { return -static_cast<double>(k) * step; }
  double left_end() const { return x_at(values.size() - 1); }
  /// Throws RangeError for x outside [left_end(), 0].
  double value_at(double x) const;
};

struct ScaledEnsemble {
  int N = 0;
  double t = 0.0;
  std::vector<ScaledCurve> curves;  // curves[i-1] is H_i
};

/// H_i(x) = L_i(1 - x sqrt(N)) + ((2 floor(Nt/2) + i + 1 + [x sqrt(N) odd]) / 2) log N.
/// The ensemble must come from n = floor(Nt/2) + 1 and theta = 1/2 + sqrt(N).
ScaledEnsemble scaled_ensemble(const LineEnsemble& ensemble, int N, double t);

int ensemble_size_for(int N, double t);
double theta_for_scale(int N);

using Curve = std::function<double(double)>;

/// x -> (curve(x t^{2/3}) + t/24) / t^{1/3}
Curve rescale_123(Curve curve, double t);
/// Inverse of rescale_123 for the same t.
Curve unrescale_123(Curve curve, double t);

struct Site {
  int i = 1;
  int j = 1;
};

double log_Z_full_perturbed(const EnvFullPerturbed& env, int m, int n);
/// Sum over up-right paths start -> end of the product of weights, both
/// endpoints included.
double log_Z_full_from(const EnvFullPerturbed& env, Site start, Site end);

/// |log Z_full(m,n) - logsumexp_k(sum_{j<=k} log W_{1,j} + log Z_full((2,k) -> (m,n)))|
double verify_row_decomposition(const EnvFullPerturbed& env, int m, int n);

/// One draw of (log Z_full(m,n), log sum_{r=m}^{m+n-1} Z(r, m+n-r)) from two
/// independent environments. Requires m >= n.
std::pair<double, double> sample_bw_identity_pair(RngState& rng, double theta, double alpha, int m, int n);

}  // namespace hslg::polymer
