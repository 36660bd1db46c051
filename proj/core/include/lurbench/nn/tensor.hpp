#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "lurbench/errors.hpp"

namespace lur::nn {

// Dense row-major tensor. Parameters carry a same-shape gradient
// accumulator; activations do not.
template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;
  std::vector<T> grad;
  bool requires_grad = false;

  TensorT() = default;
  explicit TensorT(std::vector<int> s, bool req_grad = false)
      : shape(std::move(s)), requires_grad(req_grad) {
    data.assign(numel_of(shape), T(0));
    if (requires_grad) grad.assign(data.size(), T(0));
  }

  static size_t numel_of(const std::vector<int>& s) {
    size_t n = 1;
    for (int e : s) {
      if (e <= 0) throw ShapeError("tensor extents must be positive");
      n *= static_cast<size_t>(e);
    }
    return n;
  }

  size_t numel() const { return data.size(); }

  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  void zero_grad() {
    if (requires_grad) std::fill(grad.begin(), grad.end(), T(0));
  }

  void release() {
    shape.clear();
    data.clear();
    data.shrink_to_fit();
  }
};

using Tensor = TensorT<float>;

// Mean squared error over equally sized vectors. When grad is non-null it
// receives d(loss)/d(pred) = 2 (pred - target) / n.
template <typename T>
T mse_loss(const std::vector<T>& pred, const std::vector<T>& target,
           std::vector<T>* grad = nullptr) {
  if (pred.empty()) throw std::invalid_argument("mse_loss on empty input");
  if (pred.size() != target.size())
    throw ShapeError("mse_loss length mismatch");
  const T n = static_cast<T>(pred.size());
  T acc = T(0);
  if (grad) grad->resize(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const T d = pred[i] - target[i];
    acc += d * d;
    if (grad) (*grad)[i] = T(2) * d / n;
  }
  return acc / n;
}

}  // namespace lur::nn
