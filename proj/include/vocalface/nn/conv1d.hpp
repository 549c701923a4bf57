#pragma once

#include <string>
#include <vector>

#include "vocalface/nn/im2col.hpp"
#include "vocalface/nn/param.hpp"
#include "vocalface/parallel.hpp"

namespace vf::nn {

// 1D convolution with SAME padding: t_out = ceil(t_in / stride). Sequences in
// a batch may have different lengths. No bias (the encoder always follows
// convolutions with a batch norm).
template <typename S>
class Conv1dSame {
 public:
  Conv1dSame() = default;
  Conv1dSame(int in_ch, int out_ch, int kernel, int stride)
      : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride) {
    weight_.resize(out_ch, in_ch * kernel);
    grad_w_ = Mat<S>::Zero(out_ch, in_ch * kernel);
  }

  void init(Rng& rng) { init_fan_in_uniform(weight_, in_ch_ * k_, rng); }

  static int out_len(int t_in, int stride) { return (t_in + stride - 1) / stride; }

  SeqBatch<S> forward(const SeqBatch<S>& x) {
    const int n = static_cast<int>(x.size());
    cols_.resize(static_cast<size_t>(n));
    in_lens_.resize(static_cast<size_t>(n));
    SeqBatch<S> y(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      const Mat<S>& xi = x[static_cast<size_t>(i)];
      if (static_cast<int>(xi.rows()) != in_ch_)
        throw ShapeError("conv1d expects " + std::to_string(in_ch_) + " channels, got " +
                         std::to_string(xi.rows()));
      const int t_in = static_cast<int>(xi.cols());
      const int t_out = out_len(t_in, stride_);
      in_lens_[static_cast<size_t>(i)] = t_in;
      im2col_1d(xi, k_, stride_, pad_left(t_in), t_out, cols_[static_cast<size_t>(i)]);
      y[static_cast<size_t>(i)].noalias() = weight_ * cols_[static_cast<size_t>(i)];
    }
    return y;
  }

  SeqBatch<S> backward(const SeqBatch<S>& dy, bool param_grads = true) {
    const int n = static_cast<int>(dy.size());
    SeqBatch<S> dx(static_cast<size_t>(n));
    const int nt = threads();
    std::vector<Mat<S>> dw_acc;
    if (param_grads)
      dw_acc.assign(static_cast<size_t>(nt), Mat<S>::Zero(weight_.rows(), weight_.cols()));
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      const Mat<S>& g = dy[static_cast<size_t>(i)];
      const Mat<S>& col = cols_[static_cast<size_t>(i)];
      if (param_grads) dw_acc[static_cast<size_t>(this_thread())].noalias() += g * col.transpose();
      Mat<S> dcol = weight_.transpose() * g;
      const int t_in = in_lens_[static_cast<size_t>(i)];
      col2im_1d(dcol, in_ch_, t_in, k_, stride_, pad_left(t_in), dx[static_cast<size_t>(i)]);
    }
    if (param_grads)
      for (int t = 0; t < nt; ++t) grad_w_ += dw_acc[static_cast<size_t>(t)];
    return dx;
  }

  void params(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &weight_, &grad_w_});
  }

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }

 private:
  int pad_left(int t_in) const {
    const int t_out = out_len(t_in, stride_);
    const int pad_total = std::max((t_out - 1) * stride_ + k_ - t_in, 0);
    return pad_total / 2;
  }

  int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1;
  Mat<S> weight_, grad_w_;
  std::vector<Mat<S>> cols_;
  std::vector<int> in_lens_;
};

}  // namespace vf::nn
