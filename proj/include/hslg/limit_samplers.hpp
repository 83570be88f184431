#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hslg/gibbs.hpp"
#include "hslg/rng.hpp"

namespace hslg::limits {

/// A = x_0 < ... < x_intervals = 0, equally spaced.
std::vector<double> uniform_grid(double A, int intervals);

struct LambdaPlusOptions {
  int nodes = 2048;                // inverse-CDF nodes per step
  double lower_sigmas = 8.0;       // node range below the bridge mean
  double upper_sigmas = 10.0;      // node range above the bridge mean
  double excursion_delta = 1e-3;   // a = 0 starts from this times sqrt|A|
  double pin_fraction = 1e-3;      // grid points in (-pin_fraction |A|, 0) are interpolated
  double diffusion = 1.0;
};

/// Brownian bridge from a at A to 0 at 0 conditioned positive on (A, 0),
/// sampled on `grid` (which must start at A and end at 0) step by step from
/// the h-transform kernels by numeric inverse CDF. The value at 0 is exactly 0.
std::vector<double> sample_lambda_plus(RngState& rng, double A, double a, std::span<const double> grid,
                                       const LambdaPlusOptions& options = {});

/// Pair B1 >= B2 on the grid with B1(0) = B2(0).
struct PinnedBM2 {
  std::vector<double> xs;
  std::vector<double> b1;
  std::vector<double> b2;
};

PinnedBM2 sample_pbm2(RngState& rng, double A, double a1, double a2, std::span<const double> grid,
                      const LambdaPlusOptions& options = {});

/// Conditioned curves together with rejection telemetry.
struct ConditionedCurves {
  std::vector<double> xs;
  std::vector<std::vector<double>> curves;  // curves[i] is curve i+1
  std::uint64_t attempts = 0;
  double acceptance_rate() const { return attempts ? 1.0 / static_cast<double>(attempts) : 0.0; }
};

/// True iff curves are strictly ordered and the last stays above g on the grid.
bool strictly_ordered(const std::vector<std::vector<double>>& curves, std::span<const double> xs,
                      const gibbs::BoundaryFn& g, bool skip_pinned_pairs = false);

/// m independent pinned pairs, accepted when B_{2i} > B_{2i+1} and B_{2m} > g
/// on the grid.
ConditionedCurves sample_mpbm(RngState& rng, double A, std::span<const double> starts, const gibbs::BoundaryFn& g,
                              std::span<const double> grid, std::uint64_t max_rejects = 1000000,
                              const LambdaPlusOptions& options = {});

/// Independent Brownian motions with drifts (-1)^i mu (curve i counted from 1),
/// without conditioning.
std::vector<std::vector<double>> sample_drifted_bms(RngState& rng, std::span<const double> starts, double mu,
                                                    std::span<const double> grid);

/// Drifted Brownian motions conditioned on B_1 > ... > B_n > g on the grid.
ConditionedCurves sample_critical_ni_bm(RngState& rng, double A, std::span<const double> starts, double mu,
                                        const gibbs::BoundaryFn& g, std::span<const double> grid,
                                        std::uint64_t max_rejects = 1000000);

/// exp(-2 M^2 / T): probability that a bridge from 0 to 0 of length T dips
/// below -M.
double bridge_min_tail(double T, double M);

struct BridgeTailEstimate {
  double T = 0.0;
  double M = 0.0;
  std::uint64_t samples = 0;
  int intervals = 0;
  double frequency = 0.0;
  double standard_error = 0.0;
  double theory = 0.0;
  /// Expected shortfall of the grid-monitored minimum, from the continuity
  /// correction M -> M + 0.5826 sqrt(T / intervals).
  double allowance = 0.0;
  bool within_tolerance = false;
};

/// Frequency of {min < -M} over discretized bridges; replica r uses stream r.
BridgeTailEstimate bridge_min_tail_mc(std::uint64_t seed, double T, double M, std::uint64_t samples = 100000,
                                      int intervals = 1024);

/// Largest |f_i(x) - f_i(y)| over curves and grid pairs with |x - y| < delta.
double modulus_of_continuity(const std::vector<std::vector<double>>& curves, std::span<const double> xs, double delta);

}  // namespace hslg::limits
