#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lurbench/nn/layers.hpp"

namespace lur::nn {

// Plain layer stack. Single writer during forward/backward; a frozen
// instance is safe for concurrent readers in eval mode.
template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  void add(const std::string& name, std::unique_ptr<Layer<T>> layer) {
    layer->name = name;
    layers_.push_back(std::move(layer));
  }

  TensorT<T> forward(const TensorT<T>& x, bool train) {
    TensorT<T> cur = x;
    for (auto& l : layers_) cur = l->forward(cur, train);
    return cur;
  }

  TensorT<T> backward(const TensorT<T>& grad_out) {
    TensorT<T> cur = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      cur = (*it)->backward(cur);
    }
    return cur;
  }

  void init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& l : layers_) l->init(rng);
  }

  void zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
  }

  // Toggles the guided-backpropagation gate on every relu. Forward passes
  // are unaffected.
  void set_guided(bool on) {
    for (auto& l : layers_) {
      if (auto* r = dynamic_cast<ReLU<T>*>(l.get())) r->set_guided(on);
    }
  }

  std::vector<TensorT<T>*> parameters() {
    std::vector<TensorT<T>*> out;
    for (auto& l : layers_) {
      for (auto& [n, p] : l->named_parameters()) out.push_back(p);
    }
    return out;
  }

  std::vector<std::pair<std::string, TensorT<T>*>> named_parameters() {
    std::vector<std::pair<std::string, TensorT<T>*>> out;
    for (auto& l : layers_) {
      for (auto& [n, p] : l->named_parameters())
        out.emplace_back(l->name + "." + n, p);
    }
    return out;
  }

  std::vector<std::pair<std::string, TensorT<T>*>> named_buffers() {
    std::vector<std::pair<std::string, TensorT<T>*>> out;
    for (auto& l : layers_) {
      for (auto& [n, p] : l->named_buffers())
        out.emplace_back(l->name + "." + n, p);
    }
    return out;
  }

  size_t parameter_count() {
    size_t n = 0;
    for (auto* p : parameters()) n += p->numel();
    return n;
  }

  size_t size() const { return layers_.size(); }
  Layer<T>* layer(size_t i) { return layers_[i].get(); }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace lur::nn
