#pragma once

#include <vector>

#include "vocalface/types.hpp"

namespace vf::nn {

// Mean over time of each sequence. (C, T_i) batch -> (C, batch) matrix.
template <typename S>
class TimeAvgPool {
 public:
  Mat<S> forward(const SeqBatch<S>& x) {
    const int n = static_cast<int>(x.size());
    lens_.resize(static_cast<size_t>(n));
    Mat<S> y(x.empty() ? 0 : x[0].rows(), n);
    for (int i = 0; i < n; ++i) {
      lens_[static_cast<size_t>(i)] = static_cast<int>(x[static_cast<size_t>(i)].cols());
      y.col(i) = x[static_cast<size_t>(i)].rowwise().mean();
    }
    return y;
  }

  SeqBatch<S> backward(const Mat<S>& dy) const {
    SeqBatch<S> dx(lens_.size());
    for (size_t i = 0; i < lens_.size(); ++i) {
      const int t = lens_[i];
      dx[i] = (dy.col(static_cast<int>(i)) / static_cast<S>(t)) *
              Mat<S>::Ones(1, t);
    }
    return dx;
  }

 private:
  std::vector<int> lens_;
};

// Mean over all spatial positions per channel. PlaneBatch -> (C, batch).
template <typename S>
class GlobalAvgPool2d {
 public:
  Mat<S> forward(const PlaneBatch<S>& x) {
    h_ = x.height;
    w_ = x.width;
    Mat<S> y(x.channels, x.size());
    for (int i = 0; i < x.size(); ++i)
      y.col(i) = x.maps[static_cast<size_t>(i)].rowwise().mean();
    return y;
  }

  PlaneBatch<S> backward(const Mat<S>& dy) const {
    PlaneBatch<S> dx;
    dx.channels = static_cast<int>(dy.rows());
    dx.height = h_;
    dx.width = w_;
    const int spatial = h_ * w_;
    dx.maps.resize(static_cast<size_t>(dy.cols()));
    for (int i = 0; i < dy.cols(); ++i)
      dx.maps[static_cast<size_t>(i)] =
          (dy.col(i) / static_cast<S>(spatial)) * Mat<S>::Ones(1, spatial);
    return dx;
  }

 private:
  int h_ = 0, w_ = 0;
};

}  // namespace vf::nn
