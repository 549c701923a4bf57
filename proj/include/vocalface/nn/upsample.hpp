#pragma once

#include <cmath>
#include <vector>

#include "vocalface/parallel.hpp"
#include "vocalface/types.hpp"

namespace vf::nn {

// 2x bilinear upsampling with half-pixel alignment: source coordinate of
// output index o is (o + 0.5)/2 - 0.5, clamped to the input range. With a
// 1x1 input this degenerates to replication.
template <typename S>
class Upsample2xBilinear {
 public:
  PlaneBatch<S> forward(const PlaneBatch<S>& x) {
    in_h_ = x.height;
    in_w_ = x.width;
    build_axis(x.height, ys_);
    build_axis(x.width, xs_);
    PlaneBatch<S> y;
    y.channels = x.channels;
    y.height = 2 * x.height;
    y.width = 2 * x.width;
    y.maps.resize(static_cast<size_t>(x.size()));
    const int nt = threads();
    const int n = x.size();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      const Mat<S>& src = x.maps[static_cast<size_t>(i)];
      Mat<S>& dst = y.maps[static_cast<size_t>(i)];
      dst.resize(x.channels, y.height * y.width);
      for (int oy = 0; oy < y.height; ++oy) {
        const Tap& ty = ys_[static_cast<size_t>(oy)];
        for (int ox = 0; ox < y.width; ++ox) {
          const Tap& tx = xs_[static_cast<size_t>(ox)];
          dst.col(oy * y.width + ox) =
              (S(1) - ty.w) * ((S(1) - tx.w) * src.col(ty.i0 * in_w_ + tx.i0) +
                               tx.w * src.col(ty.i0 * in_w_ + tx.i1)) +
              ty.w * ((S(1) - tx.w) * src.col(ty.i1 * in_w_ + tx.i0) +
                      tx.w * src.col(ty.i1 * in_w_ + tx.i1));
        }
      }
    }
    return y;
  }

  PlaneBatch<S> backward(const PlaneBatch<S>& dy) const {
    PlaneBatch<S> dx;
    dx.channels = dy.channels;
    dx.height = in_h_;
    dx.width = in_w_;
    dx.maps.assign(static_cast<size_t>(dy.size()),
                   Mat<S>::Zero(dy.channels, in_h_ * in_w_));
    const int nt = threads();
    const int n = dy.size();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (int i = 0; i < n; ++i) {
      const Mat<S>& g = dy.maps[static_cast<size_t>(i)];
      Mat<S>& d = dx.maps[static_cast<size_t>(i)];
      for (int oy = 0; oy < dy.height; ++oy) {
        const Tap& ty = ys_[static_cast<size_t>(oy)];
        for (int ox = 0; ox < dy.width; ++ox) {
          const Tap& tx = xs_[static_cast<size_t>(ox)];
          const auto gcol = g.col(oy * dy.width + ox);
          d.col(ty.i0 * in_w_ + tx.i0) += (S(1) - ty.w) * (S(1) - tx.w) * gcol;
          d.col(ty.i0 * in_w_ + tx.i1) += (S(1) - ty.w) * tx.w * gcol;
          d.col(ty.i1 * in_w_ + tx.i0) += ty.w * (S(1) - tx.w) * gcol;
          d.col(ty.i1 * in_w_ + tx.i1) += ty.w * tx.w * gcol;
        }
      }
    }
    return dx;
  }

 private:
  struct Tap {
    int i0 = 0, i1 = 0;
    S w = S(0);
  };

  static void build_axis(int in_size, std::vector<Tap>& taps) {
    taps.resize(static_cast<size_t>(2 * in_size));
    for (int o = 0; o < 2 * in_size; ++o) {
      double s = (o + 0.5) / 2.0 - 0.5;
      s = std::min(std::max(s, 0.0), static_cast<double>(in_size - 1));
      Tap t;
      t.i0 = static_cast<int>(std::floor(s));
      t.i1 = std::min(t.i0 + 1, in_size - 1);
      t.w = static_cast<S>(s - t.i0);
      taps[static_cast<size_t>(o)] = t;
    }
  }

  int in_h_ = 0, in_w_ = 0;
  std::vector<Tap> ys_, xs_;
};

}  // namespace vf::nn
