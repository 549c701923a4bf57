#pragma once

#include <string>
#include <vector>

#include "vocalface/nn/param.hpp"
#include "vocalface/parallel.hpp"

namespace vf::nn {

// Batch normalization over channels (rows). Statistics pool every column of
// every batch entry, so 1D inputs normalize over (batch, time) and 2D inputs
// over (batch, y, x). Running stats follow momentum-0.1 exponential averages;
// normalization uses the biased variance, running stats store the unbiased
// one.
template <typename S>
class BatchNorm {
 public:
  BatchNorm() = default;
  explicit BatchNorm(int channels, S momentum = S(0.1), S eps = S(1e-5))
      : ch_(channels), momentum_(momentum), eps_(eps) {
    gamma_ = Mat<S>::Ones(channels, 1);
    beta_ = Mat<S>::Zero(channels, 1);
    grad_gamma_ = Mat<S>::Zero(channels, 1);
    grad_beta_ = Mat<S>::Zero(channels, 1);
    running_mean_ = Mat<S>::Zero(channels, 1);
    running_var_ = Mat<S>::Ones(channels, 1);
  }

  std::vector<Mat<S>> forward(const std::vector<Mat<S>>& x, bool training,
                              bool update_running = true) {
    const int n = static_cast<int>(x.size());
    training_ = training;
    Vec<S> mean(ch_), var(ch_);
    if (training) {
      int64_t count = 0;
      Vec<S> sum = Vec<S>::Zero(ch_), sq = Vec<S>::Zero(ch_);
      for (const auto& xi : x) {
        require(static_cast<int>(xi.rows()) == ch_, "ShapeMismatch",
                "batchnorm channel mismatch");
        sum += xi.rowwise().sum();
        sq += xi.array().square().matrix().rowwise().sum();
        count += xi.cols();
      }
      n_eff_ = count;
      mean = sum / static_cast<S>(count);
      var = (sq / static_cast<S>(count) - mean.array().square().matrix())
                .cwiseMax(S(0));
      if (update_running) {
        running_mean_.col(0) = (S(1) - momentum_) * running_mean_.col(0) + momentum_ * mean;
        const S unbias = count > 1 ? static_cast<S>(count) / static_cast<S>(count - 1) : S(1);
        running_var_.col(0) =
            (S(1) - momentum_) * running_var_.col(0) + momentum_ * (var * unbias);
      }
    } else {
      mean = running_mean_.col(0);
      var = running_var_.col(0);
    }
    invstd_ = (var.array() + eps_).rsqrt().matrix();

    xhat_.resize(static_cast<size_t>(n));
    std::vector<Mat<S>> y(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      Mat<S>& h = xhat_[static_cast<size_t>(i)];
      h = ((x[static_cast<size_t>(i)].colwise() - mean).array().colwise() *
           invstd_.array())
              .matrix();
      y[static_cast<size_t>(i)] =
          ((h.array().colwise() * gamma_.col(0).array()).colwise() +
           beta_.col(0).array())
              .matrix();
    }
    return y;
  }

  std::vector<Mat<S>> backward(const std::vector<Mat<S>>& dy, bool param_grads = true) {
    const int n = static_cast<int>(dy.size());
    Vec<S> sum_dy = Vec<S>::Zero(ch_), sum_dy_xhat = Vec<S>::Zero(ch_);
    for (int i = 0; i < n; ++i) {
      sum_dy += dy[static_cast<size_t>(i)].rowwise().sum();
      sum_dy_xhat += (dy[static_cast<size_t>(i)].array() *
                      xhat_[static_cast<size_t>(i)].array())
                         .matrix()
                         .rowwise()
                         .sum();
    }
    if (param_grads) {
      grad_gamma_.col(0) += sum_dy_xhat;
      grad_beta_.col(0) += sum_dy;
    }
    std::vector<Mat<S>> dx(static_cast<size_t>(n));
    const Vec<S> g_inv = (gamma_.col(0).array() * invstd_.array()).matrix();
    const int nt = threads();
    if (training_) {
      const S inv_n = S(1) / static_cast<S>(n_eff_);
      const Vec<S> mean_dy = sum_dy * inv_n;
      const Vec<S> mean_dy_xhat = sum_dy_xhat * inv_n;
#pragma omp parallel for schedule(static) num_threads(nt)
      for (int i = 0; i < n; ++i) {
        const auto& g = dy[static_cast<size_t>(i)];
        const auto& h = xhat_[static_cast<size_t>(i)];
        dx[static_cast<size_t>(i)] =
            (((g.colwise() - mean_dy).array() -
              h.array().colwise() * mean_dy_xhat.array())
                 .colwise() *
             g_inv.array())
                .matrix();
      }
    } else {
#pragma omp parallel for schedule(static) num_threads(nt)
      for (int i = 0; i < n; ++i)
        dx[static_cast<size_t>(i)] =
            (dy[static_cast<size_t>(i)].array().colwise() * g_inv.array()).matrix();
    }
    return dx;
  }

  void params(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma_, &grad_gamma_});
    out.push_back({prefix + ".beta", &beta_, &grad_beta_});
  }

  void buffers(BufferList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".running_mean", &running_mean_});
    out.push_back({prefix + ".running_var", &running_var_});
  }

  int channels() const { return ch_; }

 private:
  int ch_ = 0;
  S momentum_ = S(0.1), eps_ = S(1e-5);
  bool training_ = true;
  int64_t n_eff_ = 0;
  Mat<S> gamma_, beta_, grad_gamma_, grad_beta_;
  Mat<S> running_mean_, running_var_;
  Vec<S> invstd_;
  std::vector<Mat<S>> xhat_;
};

}  // namespace vf::nn
