#pragma once

#include <string>
#include <vector>

#include "vocalface/nn/im2col.hpp"
#include "vocalface/nn/param.hpp"
#include "vocalface/parallel.hpp"

namespace vf::nn {

// Square-kernel 2D convolution with explicit stride/padding.
template <typename S>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool bias)
      : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride), pad_(pad),
        has_bias_(bias) {
    weight_.resize(out_ch, in_ch * kernel * kernel);
    grad_w_ = Mat<S>::Zero(out_ch, in_ch * kernel * kernel);
    if (bias) {
      bias_ = Mat<S>::Zero(out_ch, 1);
      grad_b_ = Mat<S>::Zero(out_ch, 1);
    }
  }

  void init(Rng& rng) { init_fan_in_uniform(weight_, in_ch_ * k_ * k_, rng); }

  int out_size(int in_size) const { return (in_size + 2 * pad_ - k_) / stride_ + 1; }

  PlaneBatch<S> forward(const PlaneBatch<S>& x) {
    if (x.channels != in_ch_)
      throw ShapeError("conv2d expects " + std::to_string(in_ch_) + " channels, got " +
                       std::to_string(x.channels));
    in_h_ = x.height;
    in_w_ = x.width;
    const int ho = out_size(x.height), wo = out_size(x.width);
    const int n = x.size();
    cols_.resize(static_cast<size_t>(n));
    PlaneBatch<S> y;
    y.channels = out_ch_;
    y.height = ho;
    y.width = wo;
    y.maps.resize(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      im2col_2d(x.maps[static_cast<size_t>(i)], x.height, x.width, k_, stride_, pad_,
                ho, wo, cols_[static_cast<size_t>(i)]);
      Mat<S>& yi = y.maps[static_cast<size_t>(i)];
      yi.noalias() = weight_ * cols_[static_cast<size_t>(i)];
      if (has_bias_) yi.colwise() += bias_.col(0);
    }
    return y;
  }

  PlaneBatch<S> backward(const PlaneBatch<S>& dy, bool param_grads = true) {
    const int n = dy.size();
    PlaneBatch<S> dx;
    dx.channels = in_ch_;
    dx.height = in_h_;
    dx.width = in_w_;
    dx.maps.resize(static_cast<size_t>(n));
    const int nt = threads();
    std::vector<Mat<S>> dw_acc, db_acc;
    if (param_grads) {
      dw_acc.assign(static_cast<size_t>(nt), Mat<S>::Zero(weight_.rows(), weight_.cols()));
      if (has_bias_) db_acc.assign(static_cast<size_t>(nt), Mat<S>::Zero(out_ch_, 1));
    }
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      const Mat<S>& g = dy.maps[static_cast<size_t>(i)];
      if (param_grads) {
        const int t = this_thread();
        dw_acc[static_cast<size_t>(t)].noalias() +=
            g * cols_[static_cast<size_t>(i)].transpose();
        if (has_bias_) db_acc[static_cast<size_t>(t)] += g.rowwise().sum();
      }
      Mat<S> dcol = weight_.transpose() * g;
      col2im_2d(dcol, in_ch_, in_h_, in_w_, k_, stride_, pad_, dy.height, dy.width,
                dx.maps[static_cast<size_t>(i)]);
    }
    if (param_grads)
      for (int t = 0; t < nt; ++t) {
        grad_w_ += dw_acc[static_cast<size_t>(t)];
        if (has_bias_) grad_b_ += db_acc[static_cast<size_t>(t)];
      }
    return dx;
  }

  void params(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &weight_, &grad_w_});
    if (has_bias_) out.push_back({prefix + ".b", &bias_, &grad_b_});
  }

  int out_channels() const { return out_ch_; }

 private:
  int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
  bool has_bias_ = false;
  int in_h_ = 0, in_w_ = 0;
  Mat<S> weight_, grad_w_, bias_, grad_b_;
  std::vector<Mat<S>> cols_;
};

// Transposed 2D convolution (the adjoint map of Conv2d with the same k/s/p).
// out = (in - 1)*stride - 2*pad + k. Used by the deconvolution decoder.
template <typename S>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool bias)
      : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride), pad_(pad),
        has_bias_(bias) {
    // weight laid out as (in_ch, out_ch*k*k): the adjoint conv's weight
    weight_.resize(in_ch, out_ch * kernel * kernel);
    grad_w_ = Mat<S>::Zero(in_ch, out_ch * kernel * kernel);
    if (bias) {
      bias_ = Mat<S>::Zero(out_ch, 1);
      grad_b_ = Mat<S>::Zero(out_ch, 1);
    }
  }

  void init(Rng& rng) { init_fan_in_uniform(weight_, in_ch_ * k_ * k_, rng); }

  int out_size(int in_size) const { return (in_size - 1) * stride_ - 2 * pad_ + k_; }

  PlaneBatch<S> forward(const PlaneBatch<S>& x) {
    if (x.channels != in_ch_)
      throw ShapeError("conv_transpose2d expects " + std::to_string(in_ch_) +
                       " channels, got " + std::to_string(x.channels));
    in_h_ = x.height;
    in_w_ = x.width;
    const int ho = out_size(x.height), wo = out_size(x.width);
    const int n = x.size();
    xs_ = x.maps;  // kept for the weight gradient
    PlaneBatch<S> y;
    y.channels = out_ch_;
    y.height = ho;
    y.width = wo;
    y.maps.resize(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      Mat<S> col = weight_.transpose() * x.maps[static_cast<size_t>(i)];
      col2im_2d(col, out_ch_, ho, wo, k_, stride_, pad_, x.height, x.width,
                y.maps[static_cast<size_t>(i)]);
      if (has_bias_) y.maps[static_cast<size_t>(i)].colwise() += bias_.col(0);
    }
    return y;
  }

  PlaneBatch<S> backward(const PlaneBatch<S>& dy, bool param_grads = true) {
    const int n = dy.size();
    PlaneBatch<S> dx;
    dx.channels = in_ch_;
    dx.height = in_h_;
    dx.width = in_w_;
    dx.maps.resize(static_cast<size_t>(n));
    const int nt = threads();
    std::vector<Mat<S>> dw_acc, db_acc;
    if (param_grads) {
      dw_acc.assign(static_cast<size_t>(nt), Mat<S>::Zero(weight_.rows(), weight_.cols()));
      if (has_bias_) db_acc.assign(static_cast<size_t>(nt), Mat<S>::Zero(out_ch_, 1));
    }
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      Mat<S> gcol;
      im2col_2d(dy.maps[static_cast<size_t>(i)], dy.height, dy.width, k_, stride_, pad_,
                in_h_, in_w_, gcol);
      dx.maps[static_cast<size_t>(i)].noalias() = weight_ * gcol;
      if (param_grads) {
        const int t = this_thread();
        dw_acc[static_cast<size_t>(t)].noalias() +=
            xs_[static_cast<size_t>(i)] * gcol.transpose();
        if (has_bias_)
          db_acc[static_cast<size_t>(t)] += dy.maps[static_cast<size_t>(i)].rowwise().sum();
      }
    }
    if (param_grads)
      for (int t = 0; t < nt; ++t) {
        grad_w_ += dw_acc[static_cast<size_t>(t)];
        if (has_bias_) grad_b_ += db_acc[static_cast<size_t>(t)];
      }
    return dx;
  }

  void params(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &weight_, &grad_w_});
    if (has_bias_) out.push_back({prefix + ".b", &bias_, &grad_b_});
  }

  int out_channels() const { return out_ch_; }

 private:
  int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
  bool has_bias_ = false;
  int in_h_ = 0, in_w_ = 0;
  Mat<S> weight_, grad_w_, bias_, grad_b_;
  std::vector<Mat<S>> xs_;
};

}  // namespace vf::nn
