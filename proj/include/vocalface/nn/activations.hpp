#pragma once

#include <vector>

#include "vocalface/parallel.hpp"
#include "vocalface/types.hpp"

namespace vf::nn {

template <typename S>
class ReLU {
 public:
  std::vector<Mat<S>> forward(const std::vector<Mat<S>>& x) {
    const int n = static_cast<int>(x.size());
    out_.resize(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i)
      out_[static_cast<size_t>(i)] = x[static_cast<size_t>(i)].cwiseMax(S(0));
    return out_;
  }

  std::vector<Mat<S>> backward(const std::vector<Mat<S>>& dy) const {
    const int n = static_cast<int>(dy.size());
    std::vector<Mat<S>> dx(static_cast<size_t>(n));
    const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i)
      dx[static_cast<size_t>(i)] =
          (dy[static_cast<size_t>(i)].array() *
           (out_[static_cast<size_t>(i)].array() > S(0)).template cast<S>())
              .matrix();
    return dx;
  }

 private:
  std::vector<Mat<S>> out_;
};

// Column-wise softmax with max subtraction. x is (classes, batch).
template <typename S>
Mat<S> softmax_cols(const Mat<S>& x) {
  Mat<S> y(x.rows(), x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    const S m = x.col(j).maxCoeff();
    y.col(j) = (x.col(j).array() - m).exp().matrix();
    y.col(j) /= y.col(j).sum();
  }
  return y;
}

// d(loss)/d(logits) given y = softmax_cols(logits) and d(loss)/dy.
template <typename S>
Mat<S> softmax_cols_backward(const Mat<S>& y, const Mat<S>& dy) {
  Mat<S> dx(y.rows(), y.cols());
  for (int j = 0; j < y.cols(); ++j) {
    const S dot = y.col(j).dot(dy.col(j));
    dx.col(j) = (y.col(j).array() * (dy.col(j).array() - dot)).matrix();
  }
  return dx;
}

// v / max(||v||_2, eps)
template <typename S>
Vec<S> l2_normalize(const Vec<S>& v, S eps = S(1e-12)) {
  const S n = v.norm();
  return v / std::max(n, eps);
}

// Pullback of l2_normalize at v, given the output y and upstream dy.
template <typename S>
Vec<S> l2_normalize_backward(const Vec<S>& v, const Vec<S>& y, const Vec<S>& dy,
                             S eps = S(1e-12)) {
  const S n = v.norm();
  if (n <= eps) return dy / eps;
  return (dy - y * y.dot(dy)) / n;
}

}  // namespace vf::nn
