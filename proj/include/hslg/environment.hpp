#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hslg/rng.hpp"

namespace hslg {

/// Octant environment {(i,j): 1 <= j <= i <= n_max} of log inverse-gamma
/// weights: inverse-gamma(alpha+theta) on the diagonal, inverse-gamma(2 theta)
/// strictly below it. Immutable after construction.
class EnvHalfSpace {
 public:
  EnvHalfSpace(int n_max, double theta, double alpha, std::vector<double> log_w);

  int n_max() const { return n_max_; }
  double theta() const { return theta_; }
  double alpha() const { return alpha_; }

  /// log W_{i,j}; throws RangeError outside the octant.
  double log_w(int i, int j) const;
  bool contains(int i, int j) const { return j >= 1 && j <= i && i <= n_max_; }
  const std::vector<double>& raw() const { return log_w_; }

  /// Copy with one weight replaced (used for perturbation checks).
  EnvHalfSpace with_log_w(int i, int j, double value) const;

 private:
  static std::size_t index(int i, int j) { return static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1); }

  int n_max_;
  double theta_;
  double alpha_;
  std::vector<double> log_w_;
};

/// Full-quadrant environment with a perturbed first row: row i = 1 is
/// inverse-gamma(alpha+theta), rows i > 1 are inverse-gamma(2 theta).
class EnvFullPerturbed {
 public:
  EnvFullPerturbed(int m_max, int n_max, double theta, double alpha, std::vector<double> log_w);

  int m_max() const { return m_max_; }
  int n_max() const { return n_max_; }
  double theta() const { return theta_; }
  double alpha() const { return alpha_; }
  double log_w(int i, int j) const;
  const std::vector<double>& raw() const { return log_w_; }

 private:
  int m_max_, n_max_;
  double theta_, alpha_;
  std::vector<double> log_w_;
};

/// Symmetrized full-quadrant lookup over an octant environment:
/// W~_{i,i} = W_{i,i}/2, W~_{i,j} = W_{j,i} for j > i, W~_{i,j} = W_{i,j} for j < i.
/// Holds a reference; the environment must outlive the view.
class SymmetrizedView {
 public:
  explicit SymmetrizedView(const EnvHalfSpace& env) : env_(&env) {}
  double log_w(int i, int j) const;
  int n_max() const { return env_->n_max(); }
  const EnvHalfSpace& env() const { return *env_; }

 private:
  const EnvHalfSpace* env_;
};

SymmetrizedView symmetrize(const EnvHalfSpace& env);

EnvHalfSpace build_half_env(RngState& rng, int n_max, double theta, double alpha);
EnvFullPerturbed build_full_perturbed_env(RngState& rng, int m_max, int n_max, double theta, double alpha);

/// CSV with header `i,j,log_w`, one row per site, full double precision.
void write_env_csv(std::ostream& os, const EnvHalfSpace& env);
void write_env_csv(std::ostream& os, const EnvFullPerturbed& env);
EnvHalfSpace read_half_env_csv(std::istream& is, double theta, double alpha);

/// Binary cache of half-space environments keyed by
/// (seed, stream_id, n_max, theta, alpha).
class EnvCache {
 public:
  explicit EnvCache(std::filesystem::path dir);

  /// Loads the cached environment or builds it from RngState(seed, stream)
  /// and stores it.
  EnvHalfSpace get_or_build(std::uint64_t seed, std::uint64_t stream_id, int n_max, double theta, double alpha);
  std::filesystem::path path_for(std::uint64_t seed, std::uint64_t stream_id, int n_max, double theta,
                                 double alpha) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace hslg
