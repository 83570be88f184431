#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "hslg/rng.hpp"

namespace hslg::gibbs {

enum class Side { one_sided, two_sided };
enum class Kind { discrete, continuum };

using BoundaryFn = std::function<double(double)>;

inline BoundaryFn plus_infinity() {
  return [](double) { return std::numeric_limits<double>::infinity(); };
}
inline BoundaryFn minus_infinity() {
  return [](double) { return -std::numeric_limits<double>::infinity(); };
}

/// Conventions for the discrete measure. `literal`: curve i walks with
/// parameter (-1)^i alpha and the RN exponent is
/// -(1/sqrt(N)) sum_{x sqrt(N) even} sum_{r=+-1} exp(S_{i+1}(x) - S_i(x + r/sqrt(N))).
/// `ensemble`: curve i walks with parameter (-1)^{i+1} alpha, the lower curve
/// is read at odd x sqrt(N), and the prefactor is 1/N. The second form is the
/// one the scaled line ensemble actually satisfies (see gibbs_resample_invariance).
enum class DiscreteConvention { literal, ensemble };

/// Values of curves k..ell on the spec grid; paths[c][m] is curve k+c at x_m.
using Paths = std::vector<std::vector<double>>;

/// One- or two-sided Gibbs measure on [A1, A2].
///
/// Discrete kind: scale N, grid Z_N (step 1/sqrt(N)), A1 and A2 in Z_N, free
/// curves are log-gamma walks (one-sided, curve i has parameter (-1)^i alpha)
/// or bridges. Continuum kind: scale L, uniform grid with `grid_intervals`
/// intervals, free curves are Brownian motions (one-sided, drift
/// (-1)^i alpha sqrt(L)) or bridges. With `drift_folded` the one-sided
/// continuum drift moves into the weight as sum_i (-1)^i alpha sqrt(L) B_i(0).
struct GibbsSpec {
  Side side = Side::one_sided;
  Kind kind = Kind::continuum;
  int k = 1;
  int ell = 1;
  double A1 = -1.0;
  double A2 = 0.0;
  std::vector<double> left;   // a_k..a_ell
  std::vector<double> right;  // b_k..b_ell, two-sided only
  BoundaryFn ceiling = plus_infinity();
  BoundaryFn floor = minus_infinity();
  double scale = 1.0;  // N (discrete) or L (continuum)
  double alpha = 0.0;
  bool drift_folded = true;
  int grid_intervals = 512;
  DiscreteConvention convention = DiscreteConvention::literal;

  int curve_count() const { return ell - k + 1; }
  /// Number of grid intervals actually used (|A| sqrt(N) in the discrete case).
  int intervals() const;
  double step() const;
  double x_at(int m) const { return A1 + m * step(); }
  /// Throws ContractError when the fields are inconsistent.
  void validate() const;
};

/// Free scale-N log-gamma walk on [A1, A2] (both in Z_N) from `start` with
/// parameter alpha, returned at the grid points A1, A1 + 1/sqrt(N), ..., A2.
std::vector<double> sample_lg_walk(RngState& rng, int N, double A1, double A2, double start, double alpha);

/// Log-gamma bridge from a to b: the walk's increments conditioned on their
/// sum, sampled by Metropolis moves that shift mass between two increments.
std::vector<double> sample_lg_bridge(RngState& rng, int N, double A1, double A2, double a, double b, double alpha,
                                     int sweeps = 200);

/// Log density (up to a constant) of the increment d of a scale-N walk at
/// grid index g = x sqrt(N), i.e. d = (-1)^g (X - log sqrt(N)), X ~ logGamma.
double lg_increment_log_density(int N, int g, double alpha, double d);

/// Free Brownian motion on `intervals` equal steps of size h (diffusion 1).
std::vector<double> sample_bm(RngState& rng, int intervals, double h, double start, double drift = 0.0);
std::vector<double> sample_brownian_bridge(RngState& rng, int intervals, double h, double a, double b);

/// Discrete RN exponent for rows = (f, S_k, ..., S_ell, g) on the Z_N grid
/// starting at index g0 = A1 sqrt(N). Always <= 0.
double log_W_discrete_rows(const std::vector<std::vector<double>>& rows, int N, int g0,
                           DiscreteConvention convention = DiscreteConvention::literal);

/// Walk parameter of curve i under the given convention.
double discrete_walk_parameter(int i, double alpha, DiscreteConvention convention);
double log_W_discrete(const Paths& paths, const GibbsSpec& spec);

/// Continuum RN exponent by the trapezoid rule, plus the folded drift term
/// for one-sided specs with drift_folded.
double log_W_continuum(const Paths& paths, const GibbsSpec& spec);
double log_W(const Paths& paths, const GibbsSpec& spec);

/// One draw from the free (reference) law of the spec.
Paths sample_free(RngState& rng, const GibbsSpec& spec);

struct WeightedSampleSet {
  std::vector<Paths> samples;
  std::vector<double> log_weights;
  double ess = 0.0;
  std::optional<double> acceptance_rate;

  /// Self-normalized estimate of E[fn] and its delta-method standard error.
  double weighted_mean(const std::function<double(const Paths&)>& fn) const;
  double weighted_standard_error(const std::function<double(const Paths&)>& fn) const;
};

/// M proposals from the free law with log-weights log_W. Throws SamplingError
/// when every weight vanishes.
WeightedSampleSet importance_sample_gibbs(RngState& rng, const GibbsSpec& spec, int M);

struct ChainConfig {
  long long steps = 100000;  // proposals after burn-in
  long long burn_in = 10000;
  long long thin = 100;
  double local_fraction = 0.8;
  double common_fraction = 0.1;  // curve-average moves, only with several curves
  double target_acceptance = 0.3;
  double initial_scale = 0.0;  // 0 -> sqrt(step)
};

using Observable = std::function<std::vector<double>(const Paths&)>;

struct ChainResult {
  std::vector<std::vector<double>> observations;  // one entry per kept state
  double acceptance_rate = 0.0;
  double local_scale = 0.0;
  bool mixing_warning = false;
};

/// Metropolis chain on the continuum grid discretization: single-site
/// Gaussian moves (scale adapted during burn-in only), redraws of a random
/// segment of one curve from the free law, and (with several curves)
/// Crank-Nicolson moves of the curve average on a random segment. Stationary law is the spec's Gibbs
/// measure with drift folded into the weight.
ChainResult metropolis_chain(RngState& rng, const GibbsSpec& spec, const ChainConfig& config,
                             const Observable& observe, const Paths* initial = nullptr);

/// Same chain, keeping the full paths of every kept state.
WeightedSampleSet metropolis_chain(RngState& rng, const GibbsSpec& spec, const ChainConfig& config);

}  // namespace hslg::gibbs
