#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lurbench/nn/tensor.hpp"

namespace lur::nn {

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual TensorT<T> forward(const TensorT<T>& x, bool train) = 0;
  // Returns grad w.r.t. the forward input and accumulates parameter
  // gradients. Forward caches are released afterwards.
  virtual TensorT<T> backward(const TensorT<T>& grad_out) = 0;

  virtual std::vector<std::pair<std::string, TensorT<T>*>> named_parameters() {
    return {};
  }
  // Non-learned state (batch-norm running statistics).
  virtual std::vector<std::pair<std::string, TensorT<T>*>> named_buffers() {
    return {};
  }
  virtual void init(std::mt19937_64&) {}
  virtual std::string kind() const = 0;

  std::string name;
};

template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int in_ch, int out_ch, int kernel = 3, int stride = 1, int pad = 1,
         int dilation = 1);

  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::vector<std::pair<std::string, TensorT<T>*>> named_parameters() override;
  void init(std::mt19937_64& rng) override;
  std::string kind() const override { return "conv2d"; }

  TensorT<T>& weight() { return weight_; }
  TensorT<T>& bias() { return bias_; }
  int out_channels() const { return out_ch_; }

 private:
  void im2col_chunk(const TensorT<T>& x, int n0, int n1, T* col) const;
  void col2im_chunk(const T* col, int n0, int n1, TensorT<T>* gx) const;
  int chunk_size(int batch) const;

  int in_ch_, out_ch_, kernel_, stride_, pad_, dilation_;
  int oh_ = 0, ow_ = 0, ih_ = 0, iw_ = 0;
  TensorT<T> weight_;  // [out, in, k, k]
  TensorT<T> bias_;    // [out]
  TensorT<T> x_cache_;
};

template <typename T>
class BatchNorm2d : public Layer<T> {
 public:
  explicit BatchNorm2d(int channels, T eps = T(1e-5), T momentum = T(0.1));

  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::vector<std::pair<std::string, TensorT<T>*>> named_parameters() override;
  std::vector<std::pair<std::string, TensorT<T>*>> named_buffers() override;
  std::string kind() const override { return "batchnorm2d"; }

  bool initialized() const { return step_count_.data[0] > T(0); }

 private:
  int channels_;
  T eps_, momentum_;
  TensorT<T> gamma_, beta_;
  TensorT<T> running_mean_, running_var_;
  TensorT<T> step_count_;  // scalar buffer; > 0 once a train step happened
  // backward caches
  TensorT<T> xhat_cache_;
  std::vector<T> inv_std_cache_;
  bool cached_train_mode_ = false;
};

template <typename T>
class ReLU : public Layer<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::string kind() const override { return "relu"; }

  // While guided, backward passes only positive gradients at positions
  // whose forward input was positive.
  void set_guided(bool on) { guided_ = on; }

 private:
  bool guided_ = false;
  std::vector<unsigned char> pos_mask_;
};

template <typename T>
class MaxPool2d : public Layer<T> {
 public:
  // Kernel 2, stride 2; odd trailing rows/columns are dropped.
  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::string kind() const override { return "maxpool2d"; }

 private:
  std::vector<int> argmax_;  // flat input index per output element
  std::vector<int> in_shape_;
};

template <typename T>
class Flatten : public Layer<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::string kind() const override { return "flatten"; }

 private:
  std::vector<int> in_shape_;
};

template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(int in_features, int out_features);

  TensorT<T> forward(const TensorT<T>& x, bool train) override;
  TensorT<T> backward(const TensorT<T>& grad_out) override;
  std::vector<std::pair<std::string, TensorT<T>*>> named_parameters() override;
  void init(std::mt19937_64& rng) override;
  std::string kind() const override { return "linear"; }

  TensorT<T>& weight() { return weight_; }
  TensorT<T>& bias() { return bias_; }

 private:
  int in_f_, out_f_;
  TensorT<T> weight_;  // [out, in]
  TensorT<T> bias_;    // [out]
  TensorT<T> x_cache_;
};

}  // namespace lur::nn
