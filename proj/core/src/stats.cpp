#include "lurbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "lurbench/errors.hpp"

namespace lur {

namespace {

void check_lengths(const std::vector<double>& y,
                   const std::vector<double>& y_hat) {
  if (y.empty()) throw std::invalid_argument("empty metric input");
  if (y.size() != y_hat.size())
    throw std::invalid_argument("metric length mismatch");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

double r2(const std::vector<double>& y, const std::vector<double>& y_hat) {
  check_lengths(y, y_hat);
  const double ybar = mean_of(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  if (ss_tot == 0.0) {
    throw DataError("r2 undefined: target variance is zero");
  }
  return 1.0 - ss_res / ss_tot;
}

double rmse(const std::vector<double>& y, const std::vector<double>& y_hat) {
  check_lengths(y, y_hat);
  double ss = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    ss += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  }
  return std::sqrt(ss / static_cast<double>(y.size()));
}

NormalityResult dagostino_pearson(const std::vector<double>& sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 8) {
    throw std::invalid_argument(
        "dagostino_pearson requires at least 8 observations");
  }
  const double nn = n;
  const double mean = mean_of(sample);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  if (m2 == 0.0) throw DataError("degenerate sample: zero variance");

  // Skewness transform (D'Agostino).
  const double b1 = m3 / std::pow(m2, 1.5);
  double y = b1 * std::sqrt((nn + 1.0) * (nn + 3.0) / (6.0 * (nn - 2.0)));
  const double beta2 = 3.0 * (nn * nn + 27.0 * nn - 70.0) * (nn + 1.0) *
                       (nn + 3.0) /
                       ((nn - 2.0) * (nn + 5.0) * (nn + 7.0) * (nn + 9.0));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  if (y == 0.0) y = 1.0;
  const double z_skew =
      delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));

  // Kurtosis transform (Anscombe-Glynn).
  const double b2 = m4 / (m2 * m2);
  const double e_b2 = 3.0 * (nn - 1.0) / (nn + 1.0);
  const double var_b2 = 24.0 * nn * (nn - 2.0) * (nn - 3.0) /
                        ((nn + 1.0) * (nn + 1.0) * (nn + 3.0) * (nn + 5.0));
  const double x = (b2 - e_b2) / std::sqrt(var_b2);
  const double sqrt_beta1 =
      6.0 * (nn * nn - 5.0 * nn + 2.0) / ((nn + 7.0) * (nn + 9.0)) *
      std::sqrt(6.0 * (nn + 3.0) * (nn + 5.0) /
                (nn * (nn - 2.0) * (nn - 3.0)));
  const double a = 6.0 + 8.0 / sqrt_beta1 *
                             (2.0 / sqrt_beta1 +
                              std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  const double term2 =
      std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  const double z_kurt = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

  NormalityResult res;
  res.n = n;
  res.small_sample_warning = n < 20;
  res.k2 = z_skew * z_skew + z_kurt * z_kurt;
  // chi-squared survival with 2 d.o.f.
  res.p = std::exp(-res.k2 / 2.0);
  return res;
}

PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired test length mismatch");
  const int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("paired t-test needs n >= 2");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double md = mean_of(d);
  double ss = 0.0;
  bool all_zero = true;
  for (double v : d) {
    ss += (v - md) * (v - md);
    if (v != 0.0) all_zero = false;
  }
  if (all_zero) return {0.0, 1.0, true};
  const double sd = std::sqrt(ss / (n - 1));
  if (sd == 0.0) {
    // Identical non-zero shift in every pair.
    return {std::copysign(std::numeric_limits<double>::infinity(), md), 0.0,
            false};
  }
  const double t = md / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(n - 1);
  const double p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  return {t, p, false};
}

namespace {

// Mean ranks of |d|, scaled by 2 so that tied mean ranks stay integral.
std::vector<int> scaled_ranks(const std::vector<double>& abs_d) {
  const size_t n = abs_d.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return abs_d[i] < abs_d[j]; });
  std::vector<int> rank2(n, 0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    // ranks i+1 .. j+1 tie; mean rank * 2 = (i + j + 2)
    const int r2x = static_cast<int>(i + j + 2);
    for (size_t k = i; k <= j; ++k) rank2[order[k]] = r2x;
    i = j + 1;
  }
  return rank2;
}

}  // namespace

PairedTestResult wilcoxon_signed_rank(const std::vector<double>& a,
                                      const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired test length mismatch");
  std::vector<double> d;
  d.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] - b[i];
    if (v != 0.0) d.push_back(v);
  }
  if (d.empty()) return {0.0, 1.0, true};
  const int n = static_cast<int>(d.size());

  std::vector<double> abs_d(d.size());
  for (size_t i = 0; i < d.size(); ++i) abs_d[i] = std::abs(d[i]);
  const std::vector<int> rank2 = scaled_ranks(abs_d);

  long w2_plus = 0;  // 2 * W+
  long s2 = 0;       // 2 * sum of all ranks = n(n+1)
  for (size_t i = 0; i < d.size(); ++i) {
    s2 += rank2[i];
    if (d[i] > 0.0) w2_plus += rank2[i];
  }
  const double w_plus = w2_plus / 2.0;

  if (n <= 25) {
    // Exact two-sided p over all sign assignments via subset-sum counts of
    // the doubled ranks: P(|W - S/2| >= |W_obs - S/2|).
    std::vector<double> count(static_cast<size_t>(s2) + 1, 0.0);
    count[0] = 1.0;
    long upper = 0;
    for (int i = 0; i < n; ++i) {
      const int r = rank2[static_cast<size_t>(i)];
      upper += r;
      for (long s = upper; s >= r; --s) {
        count[static_cast<size_t>(s)] += count[static_cast<size_t>(s - r)];
      }
    }
    const double mu2 = s2 / 2.0;
    const double dev = std::abs(w2_plus - mu2);
    double tail = 0.0, total = 0.0;
    for (long s = 0; s <= s2; ++s) {
      total += count[static_cast<size_t>(s)];
      if (std::abs(s - mu2) >= dev) tail += count[static_cast<size_t>(s)];
    }
    return {w_plus, std::min(1.0, tail / total), false};
  }

  // Normal approximation with tie and continuity corrections.
  const double mu = n * (n + 1) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted(abs_d);
    std::sort(sorted.begin(), sorted.end());
    size_t i = 0;
    while (i < sorted.size()) {
      size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var =
      n * (n + 1) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return {w_plus, 1.0, true};
  const double dev = w_plus - mu;
  const double cc = dev > 0 ? -0.5 : (dev < 0 ? 0.5 : 0.0);
  const double z = (dev + cc) / std::sqrt(var);
  boost::math::normal norm;
  const double p = 2.0 * boost::math::cdf(norm, -std::abs(z));
  return {w_plus, std::min(1.0, p), false};
}

double RunSample::mean_r2() const {
  double s = 0.0;
  for (const auto& r : runs) s += r.r2;
  return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

double RunSample::mean_rmse() const {
  double s = 0.0;
  for (const auto& r : runs) s += r.rmse;
  return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

const char* to_string(MetricSelector m) {
  return m == MetricSelector::r2 ? "r2" : "rmse";
}

const char* to_string(TestKind t) {
  return t == TestKind::t_test ? "t" : "wilcoxon";
}

SignificanceReport compare_models(const std::vector<RunSample>& runs,
                                  int n_hyp, MetricSelector metric,
                                  int reference) {
  if (runs.size() < 2)
    throw std::invalid_argument("compare_models needs at least two models");
  if (n_hyp < 1) throw std::invalid_argument("n_hyp must be >= 1");
  if (reference < 0 || reference >= static_cast<int>(runs.size()))
    throw std::invalid_argument("reference index out of range");
  const size_t n_runs = runs.front().runs.size();
  if (n_runs < 2)
    throw std::invalid_argument("significance tests need >= 2 runs");
  for (const auto& r : runs) {
    if (r.runs.size() != n_runs)
      throw std::invalid_argument(
          "compare_models requires equal run counts (paired by run index)");
  }

  auto metric_of = [&](const RunSample& r) {
    std::vector<double> v;
    v.reserve(r.runs.size());
    for (const auto& e : r.runs)
      v.push_back(metric == MetricSelector::r2 ? e.r2 : e.rmse);
    return v;
  };

  SignificanceReport report;
  report.n_hyp = n_hyp;
  report.metric = metric;
  const double threshold = report.alpha / n_hyp;

  std::vector<std::vector<double>> samples;
  std::vector<bool> normal;
  for (const auto& r : runs) {
    report.model_ids.push_back(r.model_id);
    samples.push_back(metric_of(r));
    double p_norm = std::numeric_limits<double>::quiet_NaN();
    bool is_normal = false;
    const auto& s = samples.back();
    const bool constant =
        std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; });
    if (s.size() >= 8 && !constant) {
      p_norm = dagostino_pearson(s).p;
      is_normal = p_norm >= 0.05;
    }
    report.normality_p.push_back(p_norm);
    normal.push_back(is_normal);
  }

  for (size_t j = 0; j < runs.size(); ++j) {
    if (static_cast<int>(j) == reference) continue;
    PairComparison pc;
    pc.model_a = runs[static_cast<size_t>(reference)].model_id;
    pc.model_b = runs[j].model_id;
    pc.threshold = threshold;
    const auto& sa = samples[static_cast<size_t>(reference)];
    const auto& sb = samples[j];
    if (normal[static_cast<size_t>(reference)] && normal[j]) {
      pc.test = TestKind::t_test;
      pc.p = paired_t_test(sa, sb).p;
    } else {
      pc.test = TestKind::wilcoxon;
      pc.p = wilcoxon_signed_rank(sa, sb).p;
    }
    pc.significant = pc.p < threshold;
    report.pairs.push_back(pc);
  }
  return report;
}

}  // namespace lur
