#pragma once

#include <cstdint>
#include <vector>

#include "hslg/gibbs.hpp"
#include "hslg/parallel.hpp"
#include "hslg/stats.hpp"

namespace hslg::gibbs {

struct ResampleConfig {
  int N = 4;
  double t = 2.0;  // ensemble size n = floor(N t / 2) + 1
  int k = 1;       // curves 1..k are redrawn
  double window_left = -2.0;
  double alpha = 0.5;
  int replicas = 10000;
  int imh_steps = 400;  // independence-sampler steps per replica; 0 = identity kernel
  DiscreteConvention convention = DiscreteConvention::ensemble;
  bool wrong_floor = false;  // negative control: floor -infinity instead of curve k+1
  double ess_floor = 100.0;
  double level = 0.01;
  std::uint64_t seed = 1;
};

struct ResampleReport {
  stats::KSReport ks;
  int n = 0;
  double median_ess = 0.0;
  double acceptance_rate = 0.0;
  std::vector<double> original;   // curve 1 at the window midpoint
  std::vector<double> resampled;
};

/// For each replica: builds the scaled line ensemble from a fresh
/// environment (theta = 1/2 + sqrt(N)), then redraws curves 1..k on
/// [window_left, 0] from their one-sided conditional Gibbs law given
/// H_i(window_left) and the floor H_{k+1}, using an independence
/// Metropolis-Hastings kernel with free log-gamma walk proposals started from
/// the original configuration. Compares curve 1 at the window midpoint
/// before and after with a two-sample KS test. A median per-replica ESS of
/// the proposal weights below `ess_floor` makes the verdict inconclusive.
ResampleReport gibbs_resample_invariance(const ResampleConfig& config, Execution ex = Execution::parallel);

}  // namespace hslg::gibbs
