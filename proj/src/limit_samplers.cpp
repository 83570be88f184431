#include "hslg/limit_samplers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hslg/errors.hpp"
#include "hslg/parallel.hpp"

namespace hslg::limits {

std::vector<double> uniform_grid(double A, int intervals) {
  HSLG_REQUIRE(A < 0.0, DomainError, "uniform_grid: need A < 0");
  HSLG_REQUIRE(intervals >= 1, DomainError, "uniform_grid: need at least one interval");
  std::vector<double> xs(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) xs[i] = A * (1.0 - static_cast<double>(i) / intervals);
  xs.back() = 0.0;
  return xs;
}

namespace {

void check_grid(double A, std::span<const double> grid) {
  HSLG_REQUIRE(grid.size() >= 2, ContractError, "grid needs at least two points");
  HSLG_REQUIRE(grid.front() == A && grid.back() == 0.0, ContractError, "grid must run from A to 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    HSLG_REQUIRE(grid[i] > grid[i - 1], DomainError, "grid must be strictly increasing");
}

// One draw of the standard positive bridge at x2 given value y at x.
double kernel_step(RngState& rng, double x, double y, double x2, const LambdaPlusOptions& opt,
                   std::vector<double>& density, std::vector<double>& cdf) {
  const double dt = x2 - x;
  const double ratio = x2 / x;
  const double mean = y * ratio;
  const double sd = std::sqrt(dt * ratio);
  const double lo = std::max(0.0, mean - opt.lower_sigmas * sd);
  const double hi = mean + opt.upper_sigmas * sd;
  const int n = opt.nodes;
  const double h = (hi - lo) / (n - 1);
  density.resize(n);
  cdf.resize(n);
  // killed Gaussian step times h(x2, .), normalized later
  for (int i = 0; i < n; ++i) {
    const double v = lo + i * h;
    const double z = (v - mean) / sd;
    density[i] = v > 0.0 ? std::exp(-0.5 * z * z) * v * -std::expm1(-2.0 * y * v / dt) : 0.0;
  }
  cdf[0] = 0.0;
  for (int i = 1; i < n; ++i) cdf[i] = cdf[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
  const double total = cdf.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::ostringstream msg;
    msg << "positive bridge step: empty inverse-CDF bracket at x=" << x << " y=" << y << " x2=" << x2
        << " range=[" << lo << ", " << hi << "] mass=" << total;
    throw SamplingError(msg.str());
  }
  const double u = rng.uniform() * total;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, n - 1));
  const double span = cdf[j] - cdf[j - 1];
  const double frac = span > 0.0 ? (u - cdf[j - 1]) / span : 0.5;
  return lo + (static_cast<double>(j) - 1.0 + frac) * h;
}

}  // namespace

std::vector<double> sample_lambda_plus(RngState& rng, double A, double a, std::span<const double> grid,
                                       const LambdaPlusOptions& options) {
  HSLG_REQUIRE(A < 0.0, DomainError, "sample_lambda_plus: need A < 0");
  HSLG_REQUIRE(a >= 0.0, DomainError, "sample_lambda_plus: need a >= 0");
  HSLG_REQUIRE(options.nodes >= 3 && options.diffusion > 0.0, DomainError, "sample_lambda_plus: bad options");
  check_grid(A, grid);
  const double s = std::sqrt(options.diffusion);
  const double pin = -options.pin_fraction * std::abs(A);
  std::vector<double> out(grid.size(), 0.0);
  out[0] = a;
  double y = a > 0.0 ? a / s : options.excursion_delta * std::sqrt(std::abs(A)) / s;
  std::vector<double> density, cdf;
  std::size_t last = 0;
  for (std::size_t i = 1; i + 1 < grid.size() && grid[i] < pin; ++i) {
    y = kernel_step(rng, grid[i - 1], y, grid[i], options, density, cdf);
    out[i] = s * y;
    last = i;
  }
  for (std::size_t i = last + 1; i + 1 < grid.size(); ++i) out[i] = out[last] * grid[i] / grid[last];
  out.back() = 0.0;
  return out;
}

PinnedBM2 sample_pbm2(RngState& rng, double A, double a1, double a2, std::span<const double> grid,
                      const LambdaPlusOptions& options) {
  HSLG_REQUIRE(a1 > a2, DomainError, "sample_pbm2: need a1 > a2");
  check_grid(A, grid);
  LambdaPlusOptions opt = options;
  opt.diffusion = 2.0;
  const auto v = sample_lambda_plus(rng, A, a1 - a2, grid, opt);
  PinnedBM2 out;
  out.xs.assign(grid.begin(), grid.end());
  out.b1.resize(grid.size());
  out.b2.resize(grid.size());
  double u = a1 + a2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) u += std::sqrt(2.0 * (grid[i] - grid[i - 1])) * rng.normal();
    out.b1[i] = 0.5 * (u + v[i]);
    out.b2[i] = 0.5 * (u - v[i]);
  }
  out.b1.back() = out.b2.back();
  return out;
}

bool strictly_ordered(const std::vector<std::vector<double>>& curves, std::span<const double> xs,
                      const gibbs::BoundaryFn& g, bool skip_pinned_pairs) {
  for (std::size_t m = 0; m < xs.size(); ++m) {
    for (std::size_t c = 0; c + 1 < curves.size(); ++c) {
      if (skip_pinned_pairs && c % 2 == 0) continue;
      if (!(curves[c][m] > curves[c + 1][m])) return false;
    }
    if (!curves.empty() && !(curves.back()[m] > g(xs[m]))) return false;
  }
  return true;
}

namespace {

void check_starts(std::span<const double> starts, const gibbs::BoundaryFn& g, double A) {
  HSLG_REQUIRE(!starts.empty(), ContractError, "need at least one start");
  for (std::size_t i = 1; i < starts.size(); ++i)
    HSLG_REQUIRE(starts[i - 1] > starts[i], DomainError, "starts must be strictly decreasing");
  HSLG_REQUIRE(starts.back() > g(A), DomainError, "last start must lie above the floor");
}

[[noreturn]] void rejection_cap(const char* what, std::uint64_t attempts) {
  std::ostringstream msg;
  msg << what << ": no acceptance in " << attempts << " attempts (acceptance rate < " << 1.0 / attempts << ")";
  throw SamplingError(msg.str());
}

}  // namespace

ConditionedCurves sample_mpbm(RngState& rng, double A, std::span<const double> starts, const gibbs::BoundaryFn& g,
                              std::span<const double> grid, std::uint64_t max_rejects,
                              const LambdaPlusOptions& options) {
  HSLG_REQUIRE(starts.size() % 2 == 0, ContractError, "sample_mpbm: need an even number of starts");
  check_starts(starts, g, A);
  check_grid(A, grid);
  ConditionedCurves out;
  out.xs.assign(grid.begin(), grid.end());
  while (out.attempts < max_rejects) {
    ++out.attempts;
    out.curves.clear();
    for (std::size_t p = 0; p < starts.size(); p += 2) {
      auto pair = sample_pbm2(rng, A, starts[p], starts[p + 1], grid, options);
      out.curves.push_back(std::move(pair.b1));
      out.curves.push_back(std::move(pair.b2));
    }
    if (strictly_ordered(out.curves, grid, g, true)) return out;
  }
  rejection_cap("sample_mpbm", out.attempts);
}

std::vector<std::vector<double>> sample_drifted_bms(RngState& rng, std::span<const double> starts, double mu,
                                                    std::span<const double> grid) {
  std::vector<std::vector<double>> curves(starts.size(), std::vector<double>(grid.size()));
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const double drift = (c % 2 == 0 ? -1.0 : 1.0) * mu;
    curves[c][0] = starts[c];
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double dt = grid[i] - grid[i - 1];
      curves[c][i] = curves[c][i - 1] + drift * dt + std::sqrt(dt) * rng.normal();
    }
  }
  return curves;
}

ConditionedCurves sample_critical_ni_bm(RngState& rng, double A, std::span<const double> starts, double mu,
                                        const gibbs::BoundaryFn& g, std::span<const double> grid,
                                        std::uint64_t max_rejects) {
  check_starts(starts, g, A);
  check_grid(A, grid);
  ConditionedCurves out;
  out.xs.assign(grid.begin(), grid.end());
  while (out.attempts < max_rejects) {
    ++out.attempts;
    out.curves = sample_drifted_bms(rng, starts, mu, grid);
    if (strictly_ordered(out.curves, grid, g, false)) return out;
  }
  rejection_cap("sample_critical_ni_bm", out.attempts);
}

double bridge_min_tail(double T, double M) {
  HSLG_REQUIRE(T > 0.0 && M >= 0.0, DomainError, "bridge_min_tail: need T > 0 and M >= 0");
  return std::exp(-2.0 * M * M / T);
}

BridgeTailEstimate bridge_min_tail_mc(std::uint64_t seed, double T, double M, std::uint64_t samples, int intervals) {
  HSLG_REQUIRE(samples >= 1 && intervals >= 1, DomainError, "bridge_min_tail_mc: need samples and intervals");
  BridgeTailEstimate out;
  out.T = T;
  out.M = M;
  out.samples = samples;
  out.intervals = intervals;
  out.theory = bridge_min_tail(T, M);
  constexpr std::uint64_t chunk = 1000;
  const std::uint64_t chunks = (samples + chunk - 1) / chunk;
  const double sd = std::sqrt(T / intervals);
  const auto hits = map_replicas(chunks, [&](std::size_t r) {
    RngState rng(seed, r);
    const std::uint64_t count = std::min(chunk, samples - r * chunk);
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1);
    std::uint64_t h = 0;
    for (std::uint64_t s = 0; s < count; ++s) {
      w[0] = 0.0;
      for (int k = 1; k <= intervals; ++k) w[k] = w[k - 1] + sd * rng.normal();
      double lowest = 0.0;
      for (int k = 1; k < intervals; ++k) lowest = std::min(lowest, w[k] - w[intervals] * k / intervals);
      h += lowest < -M;
    }
    return h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  out.frequency = static_cast<double>(total) / static_cast<double>(samples);
  out.standard_error = std::sqrt(out.theory * (1.0 - out.theory) / static_cast<double>(samples));
  constexpr double shift = 0.5826;
  out.allowance = out.theory - bridge_min_tail(T, M + shift * sd);
  out.within_tolerance = std::abs(out.frequency - out.theory) <= 3.0 * out.standard_error + out.allowance;
  return out;
}

double modulus_of_continuity(const std::vector<std::vector<double>>& curves, std::span<const double> xs, double delta) {
  HSLG_REQUIRE(delta > 0.0, DomainError, "modulus_of_continuity: need delta > 0");
  double out = 0.0;
  for (const auto& f : curves) {
    HSLG_REQUIRE(f.size() == xs.size(), ContractError, "modulus_of_continuity: curve and grid sizes differ");
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size() && xs[j] - xs[i] < delta; ++j) out = std::max(out, std::abs(f[j] - f[i]));
  }
  return out;
}

}  // namespace hslg::limits
