#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lur {

// Row-major design data: rows are observations.
using Matrix = std::vector<std::vector<double>>;

double adjusted_r2(double r2_value, int n, int p);

struct OlsFit {
  std::vector<double> coefficients;  // per predictor, intercept separate
  double intercept = 0.0;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;  // two-sided, t distribution, n-p-1 dof
  double r2 = 0.0;
  double adj_r2 = 0.0;
  int n = 0;
  int p = 0;

  double predict(const std::vector<double>& x) const;
};

// Least squares via column-pivoted Householder QR. Throws
// SingularDesignError naming the offending column on rank deficiency.
OlsFit ols_fit(const Matrix& x, const std::vector<double>& y,
               const std::vector<std::string>* col_names = nullptr);

struct MeanModel {
  double mean = 0.0;
  double predict() const { return mean; }
};

MeanModel mean_model(const std::vector<double>& targets);

// Variance inflation factors for the given design (each column regressed
// on the others). A single-column design has VIF 1 by convention.
std::vector<double> variance_inflation_factors(const Matrix& x);

struct StepwiseResult {
  std::vector<int> selected;  // indices into the caller's feature columns
  OlsFit fit;                 // over `selected`, empty when degenerate
  std::vector<double> vifs;   // per selected variable
  bool degenerate = false;    // intercept-only model
  double intercept_only_mean = 0.0;

  double predict(const std::vector<double>& full_x) const;
};

// Supervised stepwise linear model building:
//   1. rank variables by univariate adjusted R^2,
//   2. keep only the best variable per category,
//   3. greedy forward add while the best candidate improves adjusted R^2
//      by at least 0.01 (the top-ranked variable always enters first),
//   4. drop variables with p-value > 0.1 and refit once,
//   5. repeatedly drop the largest-VIF variable while any VIF > 3.
// `category_of[j]` groups the same base feature across buffer radii; pass
// distinct values for ungrouped features.
StepwiseResult stepwise_linear(const Matrix& x, const std::vector<double>& y,
                               const std::vector<int>& category_of,
                               const std::vector<std::string>* names = nullptr);

// Univariate adjusted R^2 per column; degenerate columns score -inf.
std::vector<double> univariate_adjusted_r2(const Matrix& x,
                                           const std::vector<double>& y);

// Best-scoring column index per category, ordered by score descending.
std::vector<int> best_per_category(const Matrix& x,
                                   const std::vector<double>& y,
                                   const std::vector<int>& category_of);

// Deterministic k-fold assignment (fold id per row).
std::vector<int> kfold_assignment(int n, int k, std::uint64_t seed);

// Category grouping for the 14 standard features: buffered features pair
// across radii, distances are singletons.
std::vector<int> standard_feature_categories();

Matrix select_columns(const Matrix& x, const std::vector<int>& cols);

}  // namespace lur
