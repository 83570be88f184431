#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "hslg/parallel.hpp"
#include "hslg/stats.hpp"

namespace hslg::limits {

/// Shared Metropolis settings for the finite-L chains.
struct ChainPlan {
  int grid_intervals = 1024;
  int chains = 8;              // independent chains, samples split evenly
  long long burn_in = 1000000;  // proposals per chain before sampling
  long long thin = 4000;        // proposals between kept states
};

struct WconvConfig {
  double A = -1.0;
  double a = 1.0;
  double alpha = 1.0;
  std::vector<double> L_list{25.0, 100.0, 400.0};
  int samples = 10000;
  ChainPlan chain;
  double ks_cap = 0.1;      // at the largest L
  double b0_mean_cap = 0.1;  // |mean B(0)| at the largest L
  std::uint64_t seed = 1;
};

struct WconvLevel {
  double L = 0.0;
  stats::KSReport ks;  // x = A/2 marginal against the positive-bridge law
  double b0_mean = 0.0;
  double b0_standard_error = 0.0;
  double acceptance_rate = 0.0;
  bool mixing_warning = false;
  /// Exact sup distance between the finite-L marginal (Feynman-Kac solve)
  /// and the limit marginal: the part of the KS statistic no sampler removes.
  std::optional<double> finite_L_distance;
  /// Chain samples against the exact finite-L marginal (a sampler check).
  std::optional<stats::KSReport> ks_finite_L;
  std::vector<double> marginal;
  std::vector<double> b0;
};

struct WconvReport {
  std::vector<WconvLevel> levels;
  bool ks_decreasing = false;
  stats::Verdict verdict = stats::Verdict::inconclusive;
};

/// Samples the single-path soft-barrier law with weight
/// exp(-alpha sqrt(L) B(0) - L int exp(-sqrt(L) B)) for each L and compares
/// the x = A/2 marginal with the positive Brownian bridge from a to 0.
WconvReport verify_wconv(const WconvConfig& config, Execution ex = Execution::parallel);

enum class Regime { supercritical, critical };
std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

struct MultipathConfig {
  Regime regime = Regime::supercritical;
  double A = -1.0;
  std::vector<double> starts{1.0, 0.0};  // 2m strictly decreasing values
  double alpha = 1.0;                    // supercritical boundary parameter
  double mu = 0.0;                       // critical: alpha = mu / sqrt(L)
  double floor = -std::numeric_limits<double>::infinity();  // constant floor g
  std::vector<double> L_list{25.0, 100.0, 400.0};
  int samples = 5000;
  ChainPlan chain{1024, 8, 1000000, 10000};
  int limit_grid_intervals = 64;
  double level = 0.01;
  double gap_floor = 0.2;  // critical: median terminal gap must exceed this
  std::uint64_t seed = 1;
};

struct MultipathLevel {
  double L = 0.0;
  stats::KSReport curve1;  // curve 1 at x = A/2, chain vs limit sampler
  stats::KSReport gap;     // B1 - B2 at x = A/2
  double median_terminal_gap = 0.0;
  double acceptance_rate = 0.0;
  bool mixing_warning = false;
  /// Supercritical m = 1 without floor only: the gap is the diffusion-2
  /// soft-barrier path, so its exact finite-L law is available.
  std::optional<double> gap_finite_L_distance;
  std::optional<stats::KSReport> gap_ks_finite_L;
  /// Same for curve 1 = (U + gap) / 2 with U an independent Gaussian.
  std::optional<double> curve1_finite_L_distance;
  std::optional<stats::KSReport> curve1_ks_finite_L;
};

struct MultipathReport {
  Regime regime = Regime::supercritical;
  std::vector<MultipathLevel> levels;
  double limit_median_terminal_gap = 0.0;
  double limit_acceptance_rate = 0.0;
  bool trend_ok = false;     // supercritical: median terminal gap decreases in L
  bool contrast_ok = false;  // critical: median terminal gap stays above gap_floor
  stats::Verdict verdict = stats::Verdict::inconclusive;
};

/// Finite-L one-sided Gibbs measure on 2m curves against its limit: pinned
/// pairs (supercritical) or non-intersecting drifted Brownian motions
/// (critical). Supercritical passes when both KS tests pass at the largest L
/// and the terminal gap shrinks from the smallest to the largest L; critical
/// passes when every median terminal gap (chains and limit) exceeds
/// gap_floor, with its KS tests reported alongside.
MultipathReport verify_multipath_limit(const MultipathConfig& config, Execution ex = Execution::parallel);

}  // namespace hslg::limits
