#include "hslg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hslg/errors.hpp"

namespace hslg::stats {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> values) {
  HSLG_REQUIRE(!values.empty(), DomainError, "log_sum_exp of an empty list");
  const double top = *std::max_element(values.begin(), values.end());
  if (top == kNegInf) return kNegInf;
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double ess(std::span<const double> log_weights) {
  HSLG_REQUIRE(!log_weights.empty(), DomainError, "ess of an empty sample");
  const double lse = log_sum_exp(log_weights);
  HSLG_REQUIRE(lse != kNegInf, DomainError, "ess: all weights are zero");
  double sum_sq = 0.0;
  for (double lw : log_weights) {
    const double r = std::exp(lw - lse);
    sum_sq += r * r;
  }
  return 1.0 / sum_sq;
}

double digamma(double x) {
  HSLG_REQUIRE(x > 0.0 && std::isfinite(x), DomainError, "digamma requires x > 0");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  // Bernoulli tail of the asymptotic expansion, through B_14.
  const double tail =
      r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return shift + std::log(x) - 0.5 / x - tail;
}

double trigamma(double x) {
  HSLG_REQUIRE(x > 0.0 && std::isfinite(x), DomainError, "trigamma requires x > 0");
  double shift = 0.0;
  while (x < 10.0) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double tail =
      r * (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
  return shift + 1.0 / x + 0.5 * r + tail / x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

KSReport rejudge(KSReport report, KSThreshold threshold) {
  report.threshold = threshold;
  if (threshold.kind == KSThreshold::Kind::max_statistic) {
    report.verdict = report.statistic < threshold.value ? Verdict::pass : Verdict::fail;
  } else if (report.p_approx) {
    report.verdict = *report.p_approx >= threshold.value ? Verdict::pass : Verdict::fail;
  } else {
    // no calibrated p-value for weighted samples
    report.verdict = Verdict::inconclusive;
  }
  return report;
}

namespace {

std::vector<double> normalized_weights(std::span<const double> w, std::size_t n) {
  HSLG_REQUIRE(w.size() == n, DomainError, "weight vector length does not match the sample");
  double total = 0.0;
  for (double v : w) {
    HSLG_REQUIRE(v >= 0.0 && std::isfinite(v), DomainError, "weights must be finite and nonnegative");
    total += v;
  }
  HSLG_REQUIRE(total > 0.0, DomainError, "weights are all zero");
  std::vector<double> out(w.begin(), w.end());
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

KSReport ks_two_sample(std::span<const double> xs, std::span<const double> ys,
                       std::optional<std::span<const double>> weights_x,
                       std::optional<std::span<const double>> weights_y, KSThreshold threshold) {
  HSLG_REQUIRE(!xs.empty() && !ys.empty(), DomainError, "ks_two_sample needs two nonempty samples");
  const bool weighted = weights_x.has_value() || weights_y.has_value();
  std::vector<double> wx = weights_x ? normalized_weights(*weights_x, xs.size())
                                     : std::vector<double>(xs.size(), 1.0 / static_cast<double>(xs.size()));
  std::vector<double> wy = weights_y ? normalized_weights(*weights_y, ys.size())
                                     : std::vector<double>(ys.size(), 1.0 / static_cast<double>(ys.size()));

  std::vector<std::size_t> ix(xs.size()), iy(ys.size());
  std::iota(ix.begin(), ix.end(), 0);
  std::iota(iy.begin(), iy.end(), 0);
  std::sort(ix.begin(), ix.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::sort(iy.begin(), iy.end(), [&](auto a, auto b) { return ys[a] < ys[b]; });

  double fx = 0.0, fy = 0.0, d_plus = 0.0, d_minus = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ix.size() || j < iy.size()) {
    double next;
    if (i == ix.size()) next = ys[iy[j]];
    else if (j == iy.size()) next = xs[ix[i]];
    else next = std::min(xs[ix[i]], ys[iy[j]]);
    while (i < ix.size() && xs[ix[i]] == next) fx += wx[ix[i++]];
    while (j < iy.size() && ys[iy[j]] == next) fy += wy[iy[j++]];
    d_plus = std::max(d_plus, fx - fy);
    d_minus = std::max(d_minus, fy - fx);
  }

  KSReport r;
  r.d_plus = std::clamp(d_plus, 0.0, 1.0);
  r.d_minus = std::clamp(d_minus, 0.0, 1.0);
  r.statistic = std::max(r.d_plus, r.d_minus);
  r.n1 = xs.size();
  r.n2 = ys.size();
  r.weighted = weighted;
  if (!weighted) {
    const double n1 = static_cast<double>(xs.size()), n2 = static_cast<double>(ys.size());
    const double ne = std::sqrt(n1 * n2 / (n1 + n2));
    r.p_approx = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * r.statistic);
  }
  return rejudge(r, threshold);
}

KSReport ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf,
                       KSThreshold threshold) {
  HSLG_REQUIRE(!xs.empty(), DomainError, "ks_one_sample needs a nonempty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d_plus = 0.0, d_minus = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double x = sorted[i];
    std::size_t end = i;
    while (end < sorted.size() && sorted[end] == x) ++end;
    const double f = cdf(x);
    const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    HSLG_REQUIRE(f >= 0.0 && f <= 1.0 && f_left >= 0.0 && f_left <= 1.0, ContractError,
                 "cdf left [0,1] at a sample point");
    d_plus = std::max(d_plus, static_cast<double>(end) / n - f);
    d_minus = std::max(d_minus, f_left - static_cast<double>(i) / n);
    i = end;
  }
  KSReport r;
  r.d_plus = std::max(0.0, d_plus);
  r.d_minus = std::max(0.0, d_minus);
  r.statistic = std::max(r.d_plus, r.d_minus);
  r.n1 = sorted.size();
  const double rn = std::sqrt(n);
  r.p_approx = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * r.statistic);
  return rejudge(r, threshold);
}

double ks_one_sided_p(double d, std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  const double ne = a * b / (a + b);
  return std::exp(-2.0 * ne * d * d);
}

double mean(std::span<const double> xs) {
  HSLG_REQUIRE(!xs.empty(), DomainError, "mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  HSLG_REQUIRE(xs.size() >= 2, DomainError, "variance needs two observations");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

double batch_means_se(std::span<const double> xs, std::size_t batches) {
  HSLG_REQUIRE(batches >= 2 && xs.size() >= 2 * batches, DomainError, "too few observations for batch means");
  const std::size_t size = xs.size() / batches;
  std::vector<double> means;
  means.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) means.push_back(mean(xs.subspan(b * size, size)));
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

double quantile(std::vector<double> xs, double q) {
  HSLG_REQUIRE(!xs.empty(), DomainError, "quantile of an empty sample");
  HSLG_REQUIRE(q >= 0.0 && q <= 1.0, DomainError, "quantile level outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

}  // namespace hslg::stats
