#pragma once

#include <cstdint>
#include <vector>

#include "lurbench/baselines.hpp"

namespace lur {

// Random-forest hyperparameters; bounds follow the stochastic search
// space (trees 1..1000, feature fraction (0,1], leaf 1..100, split 2..20).
struct RfSpec {
  int n_trees = 500;
  double max_features_fraction = 0.5;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
  bool bootstrap = true;
};

void validate(const RfSpec& spec);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const std::vector<double>& x) const;
};

// Variance-reduction CART regression tree over the full feature set (no
// subsampling, no bootstrap). Exposed for the split-optimality oracle.
RegressionTree cart_regressor(const Matrix& x, const std::vector<double>& y,
                              int min_samples_leaf = 1,
                              int min_samples_split = 2, int max_depth = -1);

class Forest {
 public:
  static Forest fit(const Matrix& x, const std::vector<double>& y,
                    const RfSpec& spec, std::uint64_t seed);

  double predict(const std::vector<double>& x) const;
  std::vector<double> tree_predictions(const std::vector<double>& x) const;

  // Per-sample estimate from trees whose bootstrap excluded the sample,
  // scored as R^2. Requires bootstrap fitting.
  double oob_r2(const Matrix& x, const std::vector<double>& y) const;

  // Impurity-based importance (mean decrease in variance), normalized.
  const std::vector<double>& importance() const { return importance_; }
  const std::vector<std::vector<char>>& bootstrap_masks() const {
    return in_bag_;
  }
  const RfSpec& spec() const { return spec_; }
  int n_features() const { return n_features_; }
  size_t size() const { return trees_.size(); }

 private:
  RfSpec spec_;
  int n_features_ = 0;
  std::vector<RegressionTree> trees_;
  std::vector<std::vector<char>> in_bag_;  // [tree][sample]
  std::vector<double> importance_;
};

struct RfBuildResult {
  std::vector<int> selected;  // feature columns used by the final forest
  RfSpec spec;
  Forest forest;
  double variable_selection_oob_r2 = 0.0;
  double search_cv_r2 = 0.0;
  int specs_evaluated = 0;

  double predict(const std::vector<double>& full_x) const;
};

// Full model-building recipe: best buffer per category, initial
// 500-tree/half-feature forest, backward elimination by importance scored
// with out-of-bag R^2, stochastic hyperparameter search under an
// evaluation budget scored by 10-fold cross-validation, final refit.
RfBuildResult rf_build(const Matrix& x, const std::vector<double>& y,
                       const std::vector<int>& category_of,
                       std::uint64_t seed, int budget);

}  // namespace lur
