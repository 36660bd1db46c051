#include "lurbench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "lurbench/errors.hpp"
#include "lurbench/features.hpp"
#include "lurbench/stats.hpp"

namespace lur {

namespace {

Eigen::MatrixXd design_matrix(const Matrix& x) {
  const int n = static_cast<int>(x.size());
  const int p = n > 0 ? static_cast<int>(x[0].size()) : 0;
  Eigen::MatrixXd a(n, p + 1);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(x[static_cast<size_t>(i)].size()) != p)
      throw ShapeError("ragged design matrix");
    a(i, 0) = 1.0;
    for (int j = 0; j < p; ++j) a(i, j + 1) = x[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return a;
}

std::string column_name(const std::vector<std::string>* names, int j) {
  // j indexes the design matrix; 0 is the intercept.
  if (j == 0) return "intercept";
  if (names && j - 1 < static_cast<int>(names->size()))
    return (*names)[static_cast<size_t>(j - 1)];
  return "x" + std::to_string(j - 1);
}

}  // namespace

double adjusted_r2(double r2_value, int n, int p) {
  if (n - p - 1 <= 0)
    throw std::invalid_argument("adjusted_r2 needs n > p + 1");
  return 1.0 - (1.0 - r2_value) * (n - 1) / static_cast<double>(n - p - 1);
}

double OlsFit::predict(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != p)
    throw ShapeError("ols predict: wrong feature count");
  double acc = intercept;
  for (int j = 0; j < p; ++j)
    acc += coefficients[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
  return acc;
}

OlsFit ols_fit(const Matrix& x, const std::vector<double>& y,
               const std::vector<std::string>* col_names) {
  const int n = static_cast<int>(y.size());
  if (n == 0) throw std::invalid_argument("ols_fit on empty data");
  if (x.size() != y.size()) throw ShapeError("ols_fit size mismatch");
  const int p = static_cast<int>(x[0].size());
  if (n <= p + 1)
    throw std::invalid_argument("ols_fit needs n > p + 1 observations");

  Eigen::MatrixXd a = design_matrix(x);
  Eigen::VectorXd yv(n);
  for (int i = 0; i < n; ++i) yv(i) = y[static_cast<size_t>(i)];

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1) {
    // The pivot permutation lists independent columns first; the first
    // column past the rank is a dependent one.
    const auto& perm = qr.colsPermutation().indices();
    const int offending = perm[qr.rank()];
    const std::string name = column_name(col_names, offending);
    throw SingularDesignError("design matrix is rank deficient", name);
  }
  Eigen::VectorXd beta = qr.solve(yv);

  Eigen::VectorXd resid = yv - a * beta;
  const double ybar = yv.mean();
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (yv.array() - ybar).matrix().squaredNorm();
  if (ss_tot == 0.0) throw DataError("ols_fit: target variance is zero");

  const int dof = n - p - 1;
  const double sigma2 = ss_res / dof;
  Eigen::MatrixXd xtx_inv =
      (a.transpose() * a)
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(p + 1, p + 1));

  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.intercept = beta(0);
  fit.r2 = 1.0 - ss_res / ss_tot;
  fit.adj_r2 = adjusted_r2(fit.r2, n, p);
  boost::math::students_t tdist(dof);
  for (int j = 1; j <= p; ++j) {
    fit.coefficients.push_back(beta(j));
    const double se = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
    fit.std_errors.push_back(se);
    const double t = se > 0.0 ? beta(j) / se
                              : std::numeric_limits<double>::infinity();
    fit.t_stats.push_back(t);
    const double pv =
        se > 0.0 ? 2.0 * boost::math::cdf(tdist, -std::abs(t)) : 0.0;
    fit.p_values.push_back(pv);
  }
  return fit;
}

MeanModel mean_model(const std::vector<double>& targets) {
  if (targets.empty())
    throw std::invalid_argument("mean_model on empty targets");
  const double s = std::accumulate(targets.begin(), targets.end(), 0.0);
  return MeanModel{s / static_cast<double>(targets.size())};
}

std::vector<double> variance_inflation_factors(const Matrix& x) {
  const int p = x.empty() ? 0 : static_cast<int>(x[0].size());
  std::vector<double> vifs(static_cast<size_t>(p), 1.0);
  if (p < 2) return vifs;
  for (int j = 0; j < p; ++j) {
    Matrix others;
    std::vector<double> target;
    others.reserve(x.size());
    target.reserve(x.size());
    for (const auto& row : x) {
      std::vector<double> o;
      o.reserve(static_cast<size_t>(p - 1));
      for (int k = 0; k < p; ++k) {
        if (k != j) o.push_back(row[static_cast<size_t>(k)]);
      }
      others.push_back(std::move(o));
      target.push_back(row[static_cast<size_t>(j)]);
    }
    double r2j;
    try {
      r2j = ols_fit(others, target).r2;
    } catch (const SingularDesignError&) {
      vifs[static_cast<size_t>(j)] = std::numeric_limits<double>::infinity();
      continue;
    } catch (const DataError&) {
      // Constant predictor: no collinearity signal.
      vifs[static_cast<size_t>(j)] = 1.0;
      continue;
    }
    vifs[static_cast<size_t>(j)] =
        r2j >= 1.0 - 1e-12 ? std::numeric_limits<double>::infinity()
                           : 1.0 / (1.0 - r2j);
  }
  return vifs;
}

std::vector<double> univariate_adjusted_r2(const Matrix& x,
                                           const std::vector<double>& y) {
  const int p = x.empty() ? 0 : static_cast<int>(x[0].size());
  std::vector<double> scores(static_cast<size_t>(p),
                             -std::numeric_limits<double>::infinity());
  for (int j = 0; j < p; ++j) {
    Matrix single;
    single.reserve(x.size());
    for (const auto& row : x)
      single.push_back({row[static_cast<size_t>(j)]});
    try {
      scores[static_cast<size_t>(j)] = ols_fit(single, y).adj_r2;
    } catch (const SingularDesignError&) {
    } catch (const DataError&) {
    }
  }
  return scores;
}

std::vector<int> best_per_category(const Matrix& x,
                                   const std::vector<double>& y,
                                   const std::vector<int>& category_of) {
  const std::vector<double> scores = univariate_adjusted_r2(x, y);
  std::vector<int> best;  // one winner per category
  std::vector<int> seen_categories;
  for (size_t j = 0; j < scores.size(); ++j) {
    const int cat = category_of[j];
    auto it =
        std::find(seen_categories.begin(), seen_categories.end(), cat);
    if (it == seen_categories.end()) {
      seen_categories.push_back(cat);
      best.push_back(static_cast<int>(j));
    } else {
      int& cur = best[static_cast<size_t>(
          std::distance(seen_categories.begin(), it))];
      if (scores[j] > scores[static_cast<size_t>(cur)])
        cur = static_cast<int>(j);
    }
  }
  std::sort(best.begin(), best.end(), [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)])
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    return a < b;
  });
  // Degenerate columns never qualify.
  std::erase_if(best, [&](int j) {
    return !std::isfinite(scores[static_cast<size_t>(j)]);
  });
  return best;
}

Matrix select_columns(const Matrix& x, const std::vector<int>& cols) {
  Matrix out;
  out.reserve(x.size());
  for (const auto& row : x) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (int c : cols) r.push_back(row[static_cast<size_t>(c)]);
    out.push_back(std::move(r));
  }
  return out;
}

double StepwiseResult::predict(const std::vector<double>& full_x) const {
  if (degenerate) return intercept_only_mean;
  std::vector<double> x;
  x.reserve(selected.size());
  for (int c : selected) x.push_back(full_x[static_cast<size_t>(c)]);
  return fit.predict(x);
}

StepwiseResult stepwise_linear(const Matrix& x, const std::vector<double>& y,
                               const std::vector<int>& category_of,
                               const std::vector<std::string>* names) {
  const int p = x.empty() ? 0 : static_cast<int>(x[0].size());
  if (p < 2)
    throw std::invalid_argument("stepwise needs >= 2 candidate variables");
  if (category_of.size() != static_cast<size_t>(p))
    throw ShapeError("category_of size mismatch");

  StepwiseResult result;
  result.intercept_only_mean = mean_model(y).mean;

  // Steps 1-2: univariate ranking, best per category.
  std::vector<int> candidates = best_per_category(x, y, category_of);
  if (candidates.empty()) {
    result.degenerate = true;
    return result;
  }

  auto try_fit = [&](const std::vector<int>& cols, OlsFit* out) {
    try {
      *out = ols_fit(select_columns(x, cols), y);
      return true;
    } catch (const SingularDesignError&) {
      return false;
    } catch (const std::invalid_argument&) {
      return false;
    }
  };

  // Step 3: greedy forward selection; the top-ranked variable enters
  // unconditionally.
  std::vector<int> model{candidates.front()};
  candidates.erase(candidates.begin());
  OlsFit current;
  if (!try_fit(model, &current)) {
    result.degenerate = true;
    return result;
  }
  while (!candidates.empty()) {
    int best_j = -1;
    OlsFit best_fit;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int j : candidates) {
      std::vector<int> trial = model;
      trial.push_back(j);
      OlsFit f;
      if (!try_fit(trial, &f)) continue;
      if (f.adj_r2 > best_score) {
        best_score = f.adj_r2;
        best_j = j;
        best_fit = f;
      }
    }
    if (best_j < 0 || best_score < current.adj_r2 + 0.01) break;
    model.push_back(best_j);
    current = best_fit;
    candidates.erase(std::find(candidates.begin(), candidates.end(), best_j));
  }

  // Step 4: remove high p-value variables once, then refit.
  {
    std::vector<int> kept;
    for (size_t k = 0; k < model.size(); ++k) {
      if (current.p_values[k] <= 0.1) kept.push_back(model[k]);
    }
    if (kept.size() != model.size()) {
      model = kept;
      if (model.empty() || !try_fit(model, &current)) {
        result.degenerate = true;
        return result;
      }
    }
  }

  // Step 5: VIF elimination, repeated until all VIFs <= 3.
  while (model.size() >= 2) {
    const std::vector<double> vifs =
        variance_inflation_factors(select_columns(x, model));
    const auto worst =
        std::max_element(vifs.begin(), vifs.end());
    if (!(*worst > 3.0)) {
      result.vifs = vifs;
      break;
    }
    model.erase(model.begin() + std::distance(vifs.begin(), worst));
    if (!try_fit(model, &current)) {
      result.degenerate = true;
      return result;
    }
  }
  if (model.size() == 1) result.vifs = {1.0};
  if (model.empty()) {
    result.degenerate = true;
    return result;
  }

  result.selected = model;
  result.fit = current;
  return result;
}

std::vector<int> kfold_assignment(int n, int k, std::uint64_t seed) {
  if (k < 2 || n < k) throw std::invalid_argument("bad k-fold parameters");
  std::vector<int> fold(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) fold[static_cast<size_t>(i)] = i % k;
  std::mt19937_64 rng(seed);
  std::shuffle(fold.begin(), fold.end(), rng);
  return fold;
}

std::vector<int> standard_feature_categories() {
  // Pairs across the two buffer radii; distances are singletons.
  return {0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 6, 7, 8};
}

}  // namespace lur
