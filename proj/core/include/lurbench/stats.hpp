#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lur {

// Coefficient of determination 1 - SS_res / SS_tot. Requires Var(y) > 0.
double r2(const std::vector<double>& y, const std::vector<double>& y_hat);

double rmse(const std::vector<double>& y, const std::vector<double>& y_hat);

struct NormalityResult {
  double k2 = 0.0;
  double p = 1.0;
  int n = 0;
  bool small_sample_warning = false;  // n < 20
};

// D'Agostino-Pearson omnibus test: K^2 combines the transformed sample
// skewness and kurtosis; p from chi-squared with 2 degrees of freedom.
// Requires n >= 8 and non-zero variance.
NormalityResult dagostino_pearson(const std::vector<double>& sample);

struct PairedTestResult {
  double statistic = 0.0;
  double p = 1.0;
  bool degenerate = false;  // all paired differences were zero
};

// Two-sided paired t-test.
PairedTestResult paired_t_test(const std::vector<double>& a,
                               const std::vector<double>& b);

// Two-sided Wilcoxon signed-rank test with mean ranks for ties and zero
// differences dropped. Exact distribution for n <= 25 non-zero
// differences, normal approximation with continuity and tie correction
// above.
PairedTestResult wilcoxon_signed_rank(const std::vector<double>& a,
                                      const std::vector<double>& b);

struct EvalResult {
  double r2 = 0.0;
  double rmse = 0.0;
  int n_test = 0;
};

// Repeated-run results for one model, paired across models by run index.
struct RunSample {
  std::string model_id;
  std::vector<EvalResult> runs;
  std::vector<std::uint64_t> seeds;
  bool complete = true;  // false when a run diverged and was dropped

  double mean_r2() const;
  double mean_rmse() const;
};

enum class MetricSelector : int { r2 = 0, rmse };
const char* to_string(MetricSelector m);

enum class TestKind : int { t_test = 0, wilcoxon };
const char* to_string(TestKind t);

struct PairComparison {
  std::string model_a;
  std::string model_b;
  TestKind test = TestKind::wilcoxon;
  double p = 1.0;
  double threshold = 0.05 / 7.0;
  bool significant = false;
};

struct SignificanceReport {
  int n_hyp = 7;
  double alpha = 0.05;
  MetricSelector metric = MetricSelector::r2;
  std::vector<std::string> model_ids;
  std::vector<double> normality_p;  // NaN when the sample was too small
  std::vector<PairComparison> pairs;
};

// Pairs the reference model against every other model. The t-test is used
// only when both samples pass the normality test at p >= 0.05; otherwise
// the Wilcoxon signed-rank test. Significance at p < alpha / n_hyp.
SignificanceReport compare_models(const std::vector<RunSample>& runs,
                                  int n_hyp = 7,
                                  MetricSelector metric = MetricSelector::r2,
                                  int reference = 0);

}  // namespace lur
