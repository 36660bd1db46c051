#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lurbench/nn/tensor.hpp"

namespace lur::nn {

template <typename T>
struct AdamConfig {
  T lr = T(1e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Bias-corrected Adam over a fixed parameter list.
template <typename T>
class Adam {
 public:
  Adam(std::vector<TensorT<T>*> params, AdamConfig<T> cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i]->numel(), T(0));
      v_[i].assign(params_[i]->numel(), T(0));
    }
  }

  void step() {
    ++t_;
    const T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
    const T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      TensorT<T>& p = *params_[i];
      for (size_t j = 0; j < p.numel(); ++j) {
        const T g = p.grad[j];
        m_[i][j] = cfg_.beta1 * m_[i][j] + (T(1) - cfg_.beta1) * g;
        v_[i][j] = cfg_.beta2 * v_[i][j] + (T(1) - cfg_.beta2) * g * g;
        const T mhat = m_[i][j] / bc1;
        const T vhat = v_[i][j] / bc2;
        p.data[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  std::int64_t step_count() const { return t_; }

 private:
  std::vector<TensorT<T>*> params_;
  AdamConfig<T> cfg_;
  std::vector<std::vector<T>> m_, v_;
  std::int64_t t_ = 0;
};

}  // namespace lur::nn
