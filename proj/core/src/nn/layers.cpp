#include "lurbench/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lurbench/nn/gemm.hpp"

namespace lur::nn {

namespace {

// Keep im2col buffers around this many columns; chunking the batch bounds
// scratch memory while keeping GEMMs large enough to saturate BLAS.
constexpr long kTargetChunkColumns = 1 << 16;

template <typename T>
void kaiming_uniform(TensorT<T>& w, int fan_in, std::mt19937_64& rng) {
  const T bound = std::sqrt(T(6) / static_cast<T>(fan_in));
  std::uniform_real_distribution<double> u(-static_cast<double>(bound),
                                           static_cast<double>(bound));
  for (auto& v : w.data) v = static_cast<T>(u(rng));
}

template <typename T>
void bias_uniform(TensorT<T>& b, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (auto& v : b.data) v = static_cast<T>(u(rng));
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

template <typename T>
Conv2d<T>::Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad,
                  int dilation)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      dilation_(dilation),
      weight_({out_ch, in_ch, kernel, kernel}, true),
      bias_({out_ch}, true) {
  if (in_ch <= 0 || out_ch <= 0 || kernel <= 0 || stride <= 0 || pad < 0 ||
      dilation <= 0) {
    throw std::invalid_argument("bad conv2d hyperparameters");
  }
}

template <typename T>
void Conv2d<T>::init(std::mt19937_64& rng) {
  const int fan_in = in_ch_ * kernel_ * kernel_;
  kaiming_uniform(weight_, fan_in, rng);
  bias_uniform(bias_, fan_in, rng);
}

template <typename T>
std::vector<std::pair<std::string, TensorT<T>*>>
Conv2d<T>::named_parameters() {
  return {{"weight", &weight_}, {"bias", &bias_}};
}

template <typename T>
int Conv2d<T>::chunk_size(int batch) const {
  const long per_sample = static_cast<long>(oh_) * ow_;
  long c = kTargetChunkColumns / std::max(1L, per_sample);
  return static_cast<int>(std::clamp(c, 1L, static_cast<long>(batch)));
}

template <typename T>
void Conv2d<T>::im2col_chunk(const TensorT<T>& x, int n0, int n1,
                             T* col) const {
  const int rows = in_ch_ * kernel_ * kernel_;
  const long cols = static_cast<long>(n1 - n0) * oh_ * ow_;
  const long plane = static_cast<long>(ih_) * iw_;
  const long sample = static_cast<long>(in_ch_) * plane;

#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int c = r / (kernel_ * kernel_);
    const int ky = (r / kernel_) % kernel_;
    const int kx = r % kernel_;
    T* dst = col + static_cast<long>(r) * cols;
    for (int n = n0; n < n1; ++n) {
      const T* src = x.data.data() + n * sample + c * plane;
      for (int oy = 0; oy < oh_; ++oy) {
        const int iy = oy * stride_ - pad_ + ky * dilation_;
        if (iy < 0 || iy >= ih_) {
          std::fill_n(dst, ow_, T(0));
          dst += ow_;
          continue;
        }
        if (stride_ == 1 && dilation_ == 1) {
          // Contiguous row with zero-padded edges.
          const int ix0 = -pad_ + kx * dilation_;
          const int lo = std::max(0, -ix0);
          const int hi = std::min(ow_, iw_ - ix0);
          if (hi <= lo) {
            std::fill_n(dst, ow_, T(0));
          } else {
            if (lo > 0) std::fill_n(dst, lo, T(0));
            std::memcpy(dst + lo, src + iy * iw_ + ix0 + lo,
                        sizeof(T) * (hi - lo));
            if (hi < ow_) std::fill_n(dst + hi, ow_ - hi, T(0));
          }
          dst += ow_;
        } else {
          for (int ox = 0; ox < ow_; ++ox) {
            const int ix = ox * stride_ - pad_ + kx * dilation_;
            *dst++ = (ix < 0 || ix >= iw_) ? T(0) : src[iy * iw_ + ix];
          }
        }
      }
    }
  }
}

template <typename T>
void Conv2d<T>::col2im_chunk(const T* col, int n0, int n1,
                             TensorT<T>* gx) const {
  const int rows = in_ch_ * kernel_ * kernel_;
  const long cols = static_cast<long>(n1 - n0) * oh_ * ow_;
  const long plane = static_cast<long>(ih_) * iw_;
  const long sample = static_cast<long>(in_ch_) * plane;

  // Samples write disjoint regions; rows within a sample overlap, so the
  // row loop stays sequential per sample.
#pragma omp parallel for schedule(static)
  for (int n = n0; n < n1; ++n) {
    T* gdst = gx->data.data() + n * sample;
    for (int r = 0; r < rows; ++r) {
      const int c = r / (kernel_ * kernel_);
      const int ky = (r / kernel_) % kernel_;
      const int kx = r % kernel_;
      const T* src = col + static_cast<long>(r) * cols +
                     static_cast<long>(n - n0) * oh_ * ow_;
      for (int oy = 0; oy < oh_; ++oy) {
        const int iy = oy * stride_ - pad_ + ky * dilation_;
        if (iy < 0 || iy >= ih_) {
          src += ow_;
          continue;
        }
        T* grow = gdst + c * plane + iy * iw_;
        for (int ox = 0; ox < ow_; ++ox) {
          const int ix = ox * stride_ - pad_ + kx * dilation_;
          if (ix >= 0 && ix < iw_) grow[ix] += src[ox];
        }
        src += ow_;
      }
    }
  }
}

template <typename T>
TensorT<T> Conv2d<T>::forward(const TensorT<T>& x, bool /*train*/) {
  if (x.shape.size() != 4 || x.dim(1) != in_ch_) {
    throw ShapeError("conv2d: expected [N," + std::to_string(in_ch_) +
                     ",H,W] input");
  }
  const int batch = x.dim(0);
  ih_ = x.dim(2);
  iw_ = x.dim(3);
  const int span = dilation_ * (kernel_ - 1) + 1;
  oh_ = (ih_ + 2 * pad_ - span) / stride_ + 1;
  ow_ = (iw_ + 2 * pad_ - span) / stride_ + 1;
  if (oh_ <= 0 || ow_ <= 0) throw ShapeError("conv2d: input too small");

  TensorT<T> y({batch, out_ch_, oh_, ow_});
  const int rows = in_ch_ * kernel_ * kernel_;
  const int chunk = chunk_size(batch);
  std::vector<T> col(static_cast<size_t>(rows) * chunk * oh_ * ow_);
  std::vector<T> out_mat(static_cast<size_t>(out_ch_) * chunk * oh_ * ow_);
  const long out_plane = static_cast<long>(oh_) * ow_;

  for (int n0 = 0; n0 < batch; n0 += chunk) {
    const int n1 = std::min(batch, n0 + chunk);
    const long cols = static_cast<long>(n1 - n0) * out_plane;
    im2col_chunk(x, n0, n1, col.data());
    gemm(false, false, out_ch_, static_cast<int>(cols), rows, T(1),
         weight_.data.data(), rows, col.data(), static_cast<int>(cols), T(0),
         out_mat.data(), static_cast<int>(cols));
    // out_mat is [out_ch, (n, oy, ox)]; scatter into NCHW and add bias.
#pragma omp parallel for schedule(static)
    for (int f = 0; f < out_ch_; ++f) {
      const T b = bias_.data[f];
      for (int n = n0; n < n1; ++n) {
        const T* src = out_mat.data() + f * cols + (n - n0) * out_plane;
        T* dst = y.data.data() +
                 (static_cast<long>(n) * out_ch_ + f) * out_plane;
        for (long i = 0; i < out_plane; ++i) dst[i] = src[i] + b;
      }
    }
  }
  x_cache_ = x;
  return y;
}

template <typename T>
TensorT<T> Conv2d<T>::backward(const TensorT<T>& gy) {
  const int batch = x_cache_.dim(0);
  const int rows = in_ch_ * kernel_ * kernel_;
  const long out_plane = static_cast<long>(oh_) * ow_;
  TensorT<T> gx(x_cache_.shape);

  // Bias gradient: one serial pass keeps accumulation order fixed.
  for (int n = 0; n < batch; ++n) {
    for (int f = 0; f < out_ch_; ++f) {
      const T* src =
          gy.data.data() + (static_cast<long>(n) * out_ch_ + f) * out_plane;
      T acc = T(0);
      for (long i = 0; i < out_plane; ++i) acc += src[i];
      bias_.grad[f] += acc;
    }
  }

  const int chunk = chunk_size(batch);
  std::vector<T> col(static_cast<size_t>(rows) * chunk * out_plane);
  std::vector<T> gy_mat(static_cast<size_t>(out_ch_) * chunk * out_plane);
  std::vector<T> gx_col(col.size());

  for (int n0 = 0; n0 < batch; n0 += chunk) {
    const int n1 = std::min(batch, n0 + chunk);
    const long cols = static_cast<long>(n1 - n0) * out_plane;
    // Gather gy into [out_ch, (n, oy, ox)].
#pragma omp parallel for schedule(static)
    for (int f = 0; f < out_ch_; ++f) {
      for (int n = n0; n < n1; ++n) {
        const T* src =
            gy.data.data() + (static_cast<long>(n) * out_ch_ + f) * out_plane;
        std::memcpy(gy_mat.data() + f * cols + (n - n0) * out_plane, src,
                    sizeof(T) * out_plane);
      }
    }
    im2col_chunk(x_cache_, n0, n1, col.data());
    // dW += gy_mat * col^T, chunks accumulated in batch order.
    gemm(false, true, out_ch_, rows, static_cast<int>(cols), T(1),
         gy_mat.data(), static_cast<int>(cols), col.data(),
         static_cast<int>(cols), T(1), weight_.grad.data(), rows);
    // dX(col) = W^T * gy_mat.
    gemm(true, false, rows, static_cast<int>(cols), out_ch_, T(1),
         weight_.data.data(), rows, gy_mat.data(), static_cast<int>(cols),
         T(0), gx_col.data(), static_cast<int>(cols));
    col2im_chunk(gx_col.data(), n0, n1, &gx);
  }
  x_cache_.release();
  return gx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(int channels, T eps, T momentum)
    : channels_(channels),
      eps_(eps),
      momentum_(momentum),
      gamma_({channels}, true),
      beta_({channels}, true),
      running_mean_({channels}),
      running_var_({channels}),
      step_count_({1}) {
  std::fill(gamma_.data.begin(), gamma_.data.end(), T(1));
  std::fill(running_var_.data.begin(), running_var_.data.end(), T(1));
}

template <typename T>
std::vector<std::pair<std::string, TensorT<T>*>>
BatchNorm2d<T>::named_parameters() {
  return {{"gamma", &gamma_}, {"beta", &beta_}};
}

template <typename T>
std::vector<std::pair<std::string, TensorT<T>*>>
BatchNorm2d<T>::named_buffers() {
  return {{"running_mean", &running_mean_},
          {"running_var", &running_var_},
          {"step_count", &step_count_}};
}

template <typename T>
TensorT<T> BatchNorm2d<T>::forward(const TensorT<T>& x, bool train) {
  if (x.shape.size() != 4 || x.dim(1) != channels_) {
    throw ShapeError("batchnorm2d: channel mismatch");
  }
  const int batch = x.dim(0);
  const long plane = static_cast<long>(x.dim(2)) * x.dim(3);
  const long m = batch * plane;
  TensorT<T> y(x.shape);

  if (!train && !initialized()) {
    throw DataError(
        "batchnorm2d: eval mode before any training step (running "
        "statistics uninitialized)");
  }

  xhat_cache_ = TensorT<T>(x.shape);
  inv_std_cache_.assign(channels_, T(0));
  cached_train_mode_ = train;

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels_; ++c) {
    T mean, var;
    if (train) {
      T sum = T(0);
      for (int n = 0; n < batch; ++n) {
        const T* src =
            x.data.data() + (static_cast<long>(n) * channels_ + c) * plane;
        for (long i = 0; i < plane; ++i) sum += src[i];
      }
      mean = sum / static_cast<T>(m);
      T ss = T(0);
      for (int n = 0; n < batch; ++n) {
        const T* src =
            x.data.data() + (static_cast<long>(n) * channels_ + c) * plane;
        for (long i = 0; i < plane; ++i) {
          const T d = src[i] - mean;
          ss += d * d;
        }
      }
      var = ss / static_cast<T>(m);  // biased, used for normalization
      const T unbiased =
          m > 1 ? ss / static_cast<T>(m - 1) : var;
      running_mean_.data[c] =
          (T(1) - momentum_) * running_mean_.data[c] + momentum_ * mean;
      running_var_.data[c] =
          (T(1) - momentum_) * running_var_.data[c] + momentum_ * unbiased;
    } else {
      mean = running_mean_.data[c];
      var = running_var_.data[c];
    }
    const T inv_std = T(1) / std::sqrt(var + eps_);
    inv_std_cache_[c] = inv_std;
    const T g = gamma_.data[c];
    const T b = beta_.data[c];
    for (int n = 0; n < batch; ++n) {
      const long off = (static_cast<long>(n) * channels_ + c) * plane;
      const T* src = x.data.data() + off;
      T* xh = xhat_cache_.data.data() + off;
      T* dst = y.data.data() + off;
      for (long i = 0; i < plane; ++i) {
        const T v = (src[i] - mean) * inv_std;
        xh[i] = v;
        dst[i] = v * g + b;
      }
    }
  }
  if (train) step_count_.data[0] += T(1);
  return y;
}

template <typename T>
TensorT<T> BatchNorm2d<T>::backward(const TensorT<T>& gy) {
  const int batch = gy.dim(0);
  const long plane = static_cast<long>(gy.dim(2)) * gy.dim(3);
  const long m = batch * plane;
  TensorT<T> gx(gy.shape);

#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels_; ++c) {
    T sum_gy = T(0), sum_gy_xhat = T(0);
    for (int n = 0; n < batch; ++n) {
      const long off = (static_cast<long>(n) * channels_ + c) * plane;
      const T* g = gy.data.data() + off;
      const T* xh = xhat_cache_.data.data() + off;
      for (long i = 0; i < plane; ++i) {
        sum_gy += g[i];
        sum_gy_xhat += g[i] * xh[i];
      }
    }
    gamma_.grad[c] += sum_gy_xhat;
    beta_.grad[c] += sum_gy;

    const T g = gamma_.data[c];
    const T inv_std = inv_std_cache_[c];
    if (cached_train_mode_) {
      const T k = g * inv_std;
      const T mean_gy = sum_gy / static_cast<T>(m);
      const T mean_gy_xhat = sum_gy_xhat / static_cast<T>(m);
      for (int n = 0; n < batch; ++n) {
        const long off = (static_cast<long>(n) * channels_ + c) * plane;
        const T* gsrc = gy.data.data() + off;
        const T* xh = xhat_cache_.data.data() + off;
        T* dst = gx.data.data() + off;
        for (long i = 0; i < plane; ++i) {
          dst[i] = k * (gsrc[i] - mean_gy - xh[i] * mean_gy_xhat);
        }
      }
    } else {
      // Eval mode: statistics are constants.
      const T k = g * inv_std;
      for (int n = 0; n < batch; ++n) {
        const long off = (static_cast<long>(n) * channels_ + c) * plane;
        const T* gsrc = gy.data.data() + off;
        T* dst = gx.data.data() + off;
        for (long i = 0; i < plane; ++i) dst[i] = k * gsrc[i];
      }
    }
  }
  xhat_cache_.release();
  inv_std_cache_.clear();
  return gx;
}

// ---------------------------------------------------------------------------
// ReLU

template <typename T>
TensorT<T> ReLU<T>::forward(const TensorT<T>& x, bool /*train*/) {
  TensorT<T> y(x.shape);
  pos_mask_.assign(x.numel(), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(x.numel()); ++i) {
    const bool pos = x.data[i] > T(0);
    pos_mask_[i] = pos ? 1 : 0;
    y.data[i] = pos ? x.data[i] : T(0);
  }
  return y;
}

template <typename T>
TensorT<T> ReLU<T>::backward(const TensorT<T>& gy) {
  TensorT<T> gx(gy.shape);
  const bool guided = guided_;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(gy.numel()); ++i) {
    T g = pos_mask_[i] ? gy.data[i] : T(0);
    if (guided && g <= T(0)) g = T(0);
    gx.data[i] = g;
  }
  pos_mask_.clear();
  return gx;
}

// ---------------------------------------------------------------------------
// MaxPool2d

template <typename T>
TensorT<T> MaxPool2d<T>::forward(const TensorT<T>& x, bool /*train*/) {
  if (x.shape.size() != 4) throw ShapeError("maxpool2d: expected NCHW");
  const int batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h < 2 || w < 2) throw ShapeError("maxpool2d: spatial extent < 2");
  const int oh = h / 2, ow = w / 2;
  in_shape_ = x.shape;
  TensorT<T> y({batch, ch, oh, ow});
  argmax_.assign(y.numel(), 0);

#pragma omp parallel for schedule(static)
  for (long nc = 0; nc < static_cast<long>(batch) * ch; ++nc) {
    const T* src = x.data.data() + nc * h * w;
    T* dst = y.data.data() + nc * oh * ow;
    int* arg = argmax_.data() + nc * oh * ow;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        // First maximum in row-major order wins ties.
        int best_idx = (2 * oy) * w + 2 * ox;
        T best = src[best_idx];
        const int cand[3] = {(2 * oy) * w + 2 * ox + 1,
                             (2 * oy + 1) * w + 2 * ox,
                             (2 * oy + 1) * w + 2 * ox + 1};
        for (int idx : cand) {
          if (src[idx] > best) {
            best = src[idx];
            best_idx = idx;
          }
        }
        dst[oy * ow + ox] = best;
        arg[oy * ow + ox] = best_idx;
      }
    }
  }
  return y;
}

template <typename T>
TensorT<T> MaxPool2d<T>::backward(const TensorT<T>& gy) {
  TensorT<T> gx(in_shape_);
  const int h = in_shape_[2], w = in_shape_[3];
  const long planes = static_cast<long>(in_shape_[0]) * in_shape_[1];
  const long out_plane = static_cast<long>(gy.dim(2)) * gy.dim(3);
#pragma omp parallel for schedule(static)
  for (long nc = 0; nc < planes; ++nc) {
    const T* g = gy.data.data() + nc * out_plane;
    const int* arg = argmax_.data() + nc * out_plane;
    T* dst = gx.data.data() + nc * h * w;
    for (long i = 0; i < out_plane; ++i) dst[arg[i]] += g[i];
  }
  argmax_.clear();
  in_shape_.clear();
  return gx;
}

// ---------------------------------------------------------------------------
// Flatten

template <typename T>
TensorT<T> Flatten<T>::forward(const TensorT<T>& x, bool /*train*/) {
  if (x.shape.empty()) throw ShapeError("flatten: empty tensor");
  in_shape_ = x.shape;
  const int batch = x.dim(0);
  const int rest = static_cast<int>(x.numel() / batch);
  TensorT<T> y({batch, rest});
  y.data = x.data;
  return y;
}

template <typename T>
TensorT<T> Flatten<T>::backward(const TensorT<T>& gy) {
  TensorT<T> gx(in_shape_);
  gx.data = gy.data;
  in_shape_.clear();
  return gx;
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Linear<T>::Linear(int in_features, int out_features)
    : in_f_(in_features),
      out_f_(out_features),
      weight_({out_features, in_features}, true),
      bias_({out_features}, true) {
  if (in_features <= 0 || out_features <= 0)
    throw std::invalid_argument("bad linear dimensions");
}

template <typename T>
void Linear<T>::init(std::mt19937_64& rng) {
  kaiming_uniform(weight_, in_f_, rng);
  bias_uniform(bias_, in_f_, rng);
}

template <typename T>
std::vector<std::pair<std::string, TensorT<T>*>>
Linear<T>::named_parameters() {
  return {{"weight", &weight_}, {"bias", &bias_}};
}

template <typename T>
TensorT<T> Linear<T>::forward(const TensorT<T>& x, bool /*train*/) {
  if (x.shape.size() != 2 || x.dim(1) != in_f_)
    throw ShapeError("linear: expected [N," + std::to_string(in_f_) + "]");
  const int batch = x.dim(0);
  TensorT<T> y({batch, out_f_});
  // y = x * W^T
  gemm(false, true, batch, out_f_, in_f_, T(1), x.data.data(), in_f_,
       weight_.data.data(), in_f_, T(0), y.data.data(), out_f_);
  for (int n = 0; n < batch; ++n) {
    for (int f = 0; f < out_f_; ++f) y.data[n * out_f_ + f] += bias_.data[f];
  }
  x_cache_ = x;
  return y;
}

template <typename T>
TensorT<T> Linear<T>::backward(const TensorT<T>& gy) {
  const int batch = x_cache_.dim(0);
  // dW += gy^T * x
  gemm(true, false, out_f_, in_f_, batch, T(1), gy.data.data(), out_f_,
       x_cache_.data.data(), in_f_, T(1), weight_.grad.data(), in_f_);
  for (int n = 0; n < batch; ++n) {
    for (int f = 0; f < out_f_; ++f) bias_.grad[f] += gy.data[n * out_f_ + f];
  }
  TensorT<T> gx(x_cache_.shape);
  // dX = gy * W
  gemm(false, false, batch, in_f_, out_f_, T(1), gy.data.data(), out_f_,
       weight_.data.data(), in_f_, T(0), gx.data.data(), in_f_);
  x_cache_.release();
  return gx;
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class ReLU<float>;
template class ReLU<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class Flatten<float>;
template class Flatten<double>;
template class Linear<float>;
template class Linear<double>;

}  // namespace lur::nn
