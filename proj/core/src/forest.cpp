#include "lurbench/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lurbench/errors.hpp"
#include "lurbench/stats.hpp"

namespace lur {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step over seed ^ salt; decouples per-tree streams from the
  // scheduling order.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitResult {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // SSE reduction
  double left_sum = 0.0, right_sum = 0.0;
  int left_n = 0, right_n = 0;
};

// Best variance-reduction split of `indices` among `features`.
SplitResult best_split(const Matrix& x, const std::vector<double>& y,
                       const std::vector<int>& indices,
                       const std::vector<int>& features,
                       int min_samples_leaf) {
  SplitResult best;
  const int n = static_cast<int>(indices.size());
  double total_sum = 0.0, total_sq = 0.0;
  for (int i : indices) {
    total_sum += y[static_cast<size_t>(i)];
    total_sq += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
  }
  const double parent_sse = total_sq - total_sum * total_sum / n;

  std::vector<std::pair<double, double>> vals(static_cast<size_t>(n));
  for (int f : features) {
    for (int i = 0; i < n; ++i) {
      const int idx = indices[static_cast<size_t>(i)];
      vals[static_cast<size_t>(i)] = {
          x[static_cast<size_t>(idx)][static_cast<size_t>(f)],
          y[static_cast<size_t>(idx)]};
    }
    std::sort(vals.begin(), vals.end());
    double left_sum = 0.0, left_sq = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      left_sum += vals[static_cast<size_t>(i)].second;
      left_sq += vals[static_cast<size_t>(i)].second *
                 vals[static_cast<size_t>(i)].second;
      if (vals[static_cast<size_t>(i)].first ==
          vals[static_cast<size_t>(i + 1)].first)
        continue;
      const int nl = i + 1;
      const int nr = n - nl;
      if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / nl) +
                         (right_sq - right_sum * right_sum / nr);
      const double gain = parent_sse - sse;
      if (gain > best.gain) {
        best.feature = f;
        best.threshold = 0.5 * (vals[static_cast<size_t>(i)].first +
                                vals[static_cast<size_t>(i + 1)].first);
        best.gain = gain;
        best.left_sum = left_sum;
        best.right_sum = right_sum;
        best.left_n = nl;
        best.right_n = nr;
      }
    }
  }
  return best;
}

struct TreeBuilder {
  const Matrix& x;
  const std::vector<double>& y;
  int min_samples_leaf;
  int min_samples_split;
  int max_features;
  int max_depth;  // -1: unlimited
  std::mt19937_64 rng;
  RegressionTree tree;
  std::vector<double>* importance = nullptr;  // unnormalized accumulation
  int n_total = 0;

  int build(std::vector<int>& indices, int depth) {
    const int n = static_cast<int>(indices.size());
    double sum = 0.0;
    for (int i : indices) sum += y[static_cast<size_t>(i)];
    const double mean = sum / n;

    TreeNode node;
    node.value = mean;
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    if (n < min_samples_split || (max_depth >= 0 && depth >= max_depth))
      return node_id;

    const int n_features = static_cast<int>(x[0].size());
    std::vector<int> features(static_cast<size_t>(n_features));
    std::iota(features.begin(), features.end(), 0);
    if (max_features < n_features) {
      // Partial Fisher-Yates draw without replacement.
      for (int i = 0; i < max_features; ++i) {
        const int j = i + static_cast<int>(rng() % (n_features - i));
        std::swap(features[static_cast<size_t>(i)],
                  features[static_cast<size_t>(j)]);
      }
      features.resize(static_cast<size_t>(max_features));
      std::sort(features.begin(), features.end());
    }

    const SplitResult split =
        best_split(x, y, indices, features, min_samples_leaf);
    if (split.feature < 0 || split.gain <= 0.0) return node_id;

    if (importance) {
      (*importance)[static_cast<size_t>(split.feature)] +=
          split.gain / n_total;
    }

    std::vector<int> left, right;
    left.reserve(static_cast<size_t>(split.left_n));
    right.reserve(static_cast<size_t>(split.right_n));
    for (int i : indices) {
      if (x[static_cast<size_t>(i)][static_cast<size_t>(split.feature)] <=
          split.threshold) {
        left.push_back(i);
      } else {
        right.push_back(i);
      }
    }
    indices.clear();
    indices.shrink_to_fit();

    tree.nodes[static_cast<size_t>(node_id)].feature = split.feature;
    tree.nodes[static_cast<size_t>(node_id)].threshold = split.threshold;
    const int l = build(left, depth + 1);
    tree.nodes[static_cast<size_t>(node_id)].left = l;
    const int r = build(right, depth + 1);
    tree.nodes[static_cast<size_t>(node_id)].right = r;
    return node_id;
  }
};

}  // namespace

void validate(const RfSpec& spec) {
  if (spec.n_trees < 1 || spec.n_trees > 1000)
    throw ConfigError("n_trees must lie in [1,1000]");
  if (!(spec.max_features_fraction > 0.0 &&
        spec.max_features_fraction <= 1.0))
    throw ConfigError("max_features_fraction must lie in (0,1]");
  if (spec.min_samples_leaf < 1 || spec.min_samples_leaf > 100)
    throw ConfigError("min_samples_leaf must lie in [1,100]");
  if (spec.min_samples_split < 2 || spec.min_samples_split > 20)
    throw ConfigError("min_samples_split must lie in [2,20]");
}

double RegressionTree::predict(const std::vector<double>& x) const {
  int node = 0;
  while (nodes[static_cast<size_t>(node)].feature >= 0) {
    const TreeNode& cur = nodes[static_cast<size_t>(node)];
    node = x[static_cast<size_t>(cur.feature)] <= cur.threshold ? cur.left
                                                                : cur.right;
  }
  return nodes[static_cast<size_t>(node)].value;
}

RegressionTree cart_regressor(const Matrix& x, const std::vector<double>& y,
                              int min_samples_leaf, int min_samples_split,
                              int max_depth) {
  if (x.empty()) throw std::invalid_argument("cart_regressor on empty data");
  TreeBuilder builder{x,
                      y,
                      min_samples_leaf,
                      min_samples_split,
                      static_cast<int>(x[0].size()),
                      max_depth,
                      std::mt19937_64(0)};
  std::vector<int> indices(x.size());
  std::iota(indices.begin(), indices.end(), 0);
  builder.n_total = static_cast<int>(x.size());
  builder.build(indices, 0);
  return std::move(builder.tree);
}

Forest Forest::fit(const Matrix& x, const std::vector<double>& y,
                   const RfSpec& spec, std::uint64_t seed) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("forest fit: bad training data");
  validate(spec);

  Forest forest;
  forest.spec_ = spec;
  forest.n_features_ = static_cast<int>(x[0].size());
  forest.trees_.resize(static_cast<size_t>(spec.n_trees));
  forest.in_bag_.assign(static_cast<size_t>(spec.n_trees),
                        std::vector<char>(x.size(), 0));
  const int max_features = std::max(
      1, static_cast<int>(std::ceil(spec.max_features_fraction *
                                    forest.n_features_)));

  std::vector<std::vector<double>> tree_importance(
      static_cast<size_t>(spec.n_trees),
      std::vector<double>(static_cast<size_t>(forest.n_features_), 0.0));

  const int n = static_cast<int>(x.size());
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < spec.n_trees; ++t) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> indices;
    indices.reserve(static_cast<size_t>(n));
    if (spec.bootstrap) {
      for (int i = 0; i < n; ++i) {
        const int pick = static_cast<int>(rng() % n);
        indices.push_back(pick);
        forest.in_bag_[static_cast<size_t>(t)][static_cast<size_t>(pick)] = 1;
      }
    } else {
      indices.resize(static_cast<size_t>(n));
      std::iota(indices.begin(), indices.end(), 0);
      std::fill(forest.in_bag_[static_cast<size_t>(t)].begin(),
                forest.in_bag_[static_cast<size_t>(t)].end(), 1);
    }
    TreeBuilder builder{x,
                        y,
                        spec.min_samples_leaf,
                        spec.min_samples_split,
                        max_features,
                        -1,
                        std::move(rng)};
    builder.n_total = n;
    builder.importance = &tree_importance[static_cast<size_t>(t)];
    builder.build(indices, 0);
    forest.trees_[static_cast<size_t>(t)] = std::move(builder.tree);
  }

  // Per-tree normalization, then average (order fixed by tree index).
  forest.importance_.assign(static_cast<size_t>(forest.n_features_), 0.0);
  for (auto& imp : tree_importance) {
    const double s = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (s <= 0.0) continue;
    for (size_t f = 0; f < imp.size(); ++f) {
      forest.importance_[f] += imp[f] / s;
    }
  }
  const double total = std::accumulate(forest.importance_.begin(),
                                       forest.importance_.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : forest.importance_) v /= total;
  }
  return forest;
}

double Forest::predict(const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(x);
  return s / static_cast<double>(trees_.size());
}

std::vector<double> Forest::tree_predictions(
    const std::vector<double>& x) const {
  std::vector<double> out;
  out.reserve(trees_.size());
  for (const auto& t : trees_) out.push_back(t.predict(x));
  return out;
}

double Forest::oob_r2(const Matrix& x, const std::vector<double>& y) const {
  if (!spec_.bootstrap)
    throw DataError("out-of-bag estimate unavailable without bootstrap");
  std::vector<double> y_kept, pred_kept;
  for (size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    int cnt = 0;
    for (size_t t = 0; t < trees_.size(); ++t) {
      if (in_bag_[t][i]) continue;
      s += trees_[t].predict(x[i]);
      ++cnt;
    }
    if (cnt == 0) continue;
    y_kept.push_back(y[i]);
    pred_kept.push_back(s / cnt);
  }
  if (y_kept.size() < 2)
    throw DataError("too few out-of-bag samples for an estimate");
  return r2(y_kept, pred_kept);
}

double RfBuildResult::predict(const std::vector<double>& full_x) const {
  std::vector<double> x;
  x.reserve(selected.size());
  for (int c : selected) x.push_back(full_x[static_cast<size_t>(c)]);
  return forest.predict(x);
}

RfBuildResult rf_build(const Matrix& x, const std::vector<double>& y,
                       const std::vector<int>& category_of,
                       std::uint64_t seed, int budget) {
  if (budget < 1) throw std::invalid_argument("rf_build budget must be >= 1");

  // Step 1: best buffer radius per variable category.
  std::vector<int> vars = best_per_category(x, y, category_of);
  if (vars.empty()) throw DataError("rf_build: no usable variables");
  std::sort(vars.begin(), vars.end());

  // Step 2: initial forest, 500 trees, half the features per split.
  RfSpec initial;
  initial.n_trees = 500;
  initial.max_features_fraction = 0.5;

  // Step 3: backward elimination by importance, scored by OOB R^2.
  std::vector<int> best_vars = vars;
  double best_oob = -std::numeric_limits<double>::infinity();
  std::vector<int> current = vars;
  int elimination_round = 0;
  while (!current.empty()) {
    const Matrix sub = select_columns(x, current);
    const Forest f = Forest::fit(
        sub, y, initial, mix_seed(seed, 1000 + elimination_round));
    const double score = f.oob_r2(sub, y);
    if (score > best_oob) {
      best_oob = score;
      best_vars = current;
    }
    if (current.size() == 1) break;
    const auto& imp = f.importance();
    const size_t drop = static_cast<size_t>(std::distance(
        imp.begin(), std::min_element(imp.begin(), imp.end())));
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
    ++elimination_round;
  }

  // Step 4: stochastic hyperparameter search, 10-fold CV per candidate.
  const Matrix sub = select_columns(x, best_vars);
  const int n = static_cast<int>(sub.size());
  const int k = std::min(10, n);
  const std::vector<int> fold = kfold_assignment(n, k, mix_seed(seed, 2));

  std::mt19937_64 sampler(mix_seed(seed, 3));
  auto sample_spec = [&]() {
    RfSpec s;
    s.n_trees = 1 + static_cast<int>(sampler() % 1000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    s.max_features_fraction = std::max(1e-9, u(sampler));
    s.min_samples_leaf = 1 + static_cast<int>(sampler() % 100);
    s.min_samples_split = 2 + static_cast<int>(sampler() % 19);
    s.bootstrap = (sampler() % 2) == 0;
    return s;
  };

  RfSpec best_spec = initial;
  double best_cv = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < budget; ++e) {
    const RfSpec cand = sample_spec();
    double acc = 0.0;
    int folds_used = 0;
    for (int fo = 0; fo < k; ++fo) {
      Matrix xtr, xte;
      std::vector<double> ytr, yte;
      for (int i = 0; i < n; ++i) {
        if (fold[static_cast<size_t>(i)] == fo) {
          xte.push_back(sub[static_cast<size_t>(i)]);
          yte.push_back(y[static_cast<size_t>(i)]);
        } else {
          xtr.push_back(sub[static_cast<size_t>(i)]);
          ytr.push_back(y[static_cast<size_t>(i)]);
        }
      }
      if (xtr.empty() || yte.size() < 2) continue;
      const Forest f =
          Forest::fit(xtr, ytr, cand, mix_seed(seed, 4000 + e));
      std::vector<double> pred;
      pred.reserve(xte.size());
      for (const auto& row : xte) pred.push_back(f.predict(row));
      acc += r2(yte, pred);
      ++folds_used;
    }
    if (folds_used == 0) continue;
    const double score = acc / folds_used;
    if (score > best_cv) {
      best_cv = score;
      best_spec = cand;
    }
  }

  // Step 5: refit the winning spec on the full training data.
  RfBuildResult result;
  result.selected = best_vars;
  result.spec = best_spec;
  result.forest = Forest::fit(sub, y, best_spec, mix_seed(seed, 5));
  result.variable_selection_oob_r2 = best_oob;
  result.search_cv_r2 = best_cv;
  result.specs_evaluated = budget;
  return result;
}

}  // namespace lur
