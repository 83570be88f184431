#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hslg::stats {

/// log(sum_i exp(v_i)), shifted by the maximum. All -inf input gives -inf.
double log_sum_exp(std::span<const double> values);
double log_add_exp(double a, double b);

/// Effective sample size (sum w)^2 / sum w^2 of log-scale weights.
double ess(std::span<const double> log_weights);

double digamma(double x);
double trigamma(double x);

double normal_cdf(double x);
/// P(sup |Brownian bridge| > lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

enum class Verdict { pass, fail, inconclusive };
std::string_view to_string(Verdict v);

/// Either a significance level (compare against p_approx) or a hard cap on
/// the statistic. Weighted comparisons only accept a statistic cap.
struct KSThreshold {
  enum class Kind { level, max_statistic };
  Kind kind = Kind::level;
  double value = 0.01;

  static KSThreshold level(double alpha) { return {Kind::level, alpha}; }
  static KSThreshold max_statistic(double d) { return {Kind::max_statistic, d}; }
};

struct KSReport {
  double statistic = 0.0;  ///< sup |F1 - F2|
  double d_plus = 0.0;     ///< sup (F1 - F2)
  double d_minus = 0.0;    ///< sup (F2 - F1)
  std::size_t n1 = 0;
  std::optional<std::size_t> n2;
  std::optional<double> p_approx;
  KSThreshold threshold;
  Verdict verdict = Verdict::inconclusive;
  bool weighted = false;
};

/// Two-sample statistic between (optionally weighted) empirical CDFs.
KSReport ks_two_sample(std::span<const double> xs, std::span<const double> ys,
                       std::optional<std::span<const double>> weights_x = std::nullopt,
                       std::optional<std::span<const double>> weights_y = std::nullopt,
                       KSThreshold threshold = KSThreshold::level(0.01));

/// One-sample statistic against a nondecreasing cdf; both one-sided gaps are
/// checked, the left gap against cdf evaluated just below each sample point.
KSReport ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf,
                       KSThreshold threshold = KSThreshold::level(0.01));

/// Re-judges an existing report against another threshold.
KSReport rejudge(KSReport report, KSThreshold threshold);

/// Approximate p-value of the one-sided statistic sup(F1 - F2).
double ks_one_sided_p(double d, std::size_t n1, std::size_t n2);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);
/// Standard error from non-overlapping batch means, for correlated chains.
double batch_means_se(std::span<const double> xs, std::size_t batches = 50);
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

}  // namespace hslg::stats
