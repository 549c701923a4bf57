#pragma once

#include <string>

#include "vocalface/nn/param.hpp"

namespace vf::nn {

// Fully connected layer on column-major batches: X is (in, batch).
template <typename S>
class Linear {
 public:
  Linear() = default;
  Linear(int in_dim, int out_dim) : in_(in_dim), out_(out_dim) {
    weight_.resize(out_dim, in_dim);
    grad_w_ = Mat<S>::Zero(out_dim, in_dim);
    bias_ = Mat<S>::Zero(out_dim, 1);
    grad_b_ = Mat<S>::Zero(out_dim, 1);
  }

  void init(Rng& rng) { init_fan_in_uniform(weight_, in_, rng); }

  Mat<S> forward(const Mat<S>& x) {
    if (static_cast<int>(x.rows()) != in_)
      throw ShapeError("linear expects " + std::to_string(in_) + " inputs, got " +
                       std::to_string(x.rows()));
    x_ = x;
    Mat<S> y = weight_ * x;
    y.colwise() += bias_.col(0);
    return y;
  }

  Mat<S> backward(const Mat<S>& dy, bool param_grads = true) {
    if (param_grads) {
      grad_w_.noalias() += dy * x_.transpose();
      grad_b_.col(0) += dy.rowwise().sum();
    }
    return weight_.transpose() * dy;
  }

  void params(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &weight_, &grad_w_});
    out.push_back({prefix + ".b", &bias_, &grad_b_});
  }

  int out_dim() const { return out_; }

 private:
  int in_ = 0, out_ = 0;
  Mat<S> weight_, grad_w_, bias_, grad_b_, x_;
};

}  // namespace vf::nn
