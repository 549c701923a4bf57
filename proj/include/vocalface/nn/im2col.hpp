#pragma once

#include "vocalface/types.hpp"

namespace vf::nn {

// Patch matrix layouts:
//   1D: row index = c*k + u            (channel-major, then tap)
//   2D: row index = (c*k + u)*k + v    (channel, then ky, then kx)
// Column index walks output positions (x for 1D, y*Wo + x for 2D).

template <typename S>
void im2col_1d(const Mat<S>& x, int k, int stride, int pad_left, int t_out,
               Mat<S>& col) {
  const int c_in = static_cast<int>(x.rows());
  const int t_in = static_cast<int>(x.cols());
  col.resize(c_in * k, t_out);
  for (int j = 0; j < t_out; ++j) {
    const int base = j * stride - pad_left;
    for (int u = 0; u < k; ++u) {
      const int t = base + u;
      if (t >= 0 && t < t_in) {
        for (int c = 0; c < c_in; ++c) col(c * k + u, j) = x(c, t);
      } else {
        for (int c = 0; c < c_in; ++c) col(c * k + u, j) = S(0);
      }
    }
  }
}

template <typename S>
void col2im_1d(const Mat<S>& col, int c_in, int t_in, int k, int stride,
               int pad_left, Mat<S>& x) {
  const int t_out = static_cast<int>(col.cols());
  x = Mat<S>::Zero(c_in, t_in);
  for (int j = 0; j < t_out; ++j) {
    const int base = j * stride - pad_left;
    for (int u = 0; u < k; ++u) {
      const int t = base + u;
      if (t < 0 || t >= t_in) continue;
      for (int c = 0; c < c_in; ++c) x(c, t) += col(c * k + u, j);
    }
  }
}

template <typename S>
void im2col_2d(const Mat<S>& x, int h_in, int w_in, int k, int stride, int pad,
               int h_out, int w_out, Mat<S>& col) {
  const int c_in = static_cast<int>(x.rows());
  col.resize(c_in * k * k, h_out * w_out);
  for (int oy = 0; oy < h_out; ++oy) {
    for (int ox = 0; ox < w_out; ++ox) {
      const int j = oy * w_out + ox;
      const int y0 = oy * stride - pad;
      const int x0 = ox * stride - pad;
      for (int u = 0; u < k; ++u) {
        const int yy = y0 + u;
        const bool row_ok = yy >= 0 && yy < h_in;
        for (int v = 0; v < k; ++v) {
          const int xx = x0 + v;
          const int r0 = u * k + v;
          if (row_ok && xx >= 0 && xx < w_in) {
            const int src = yy * w_in + xx;
            for (int c = 0; c < c_in; ++c) col(c * k * k + r0, j) = x(c, src);
          } else {
            for (int c = 0; c < c_in; ++c) col(c * k * k + r0, j) = S(0);
          }
        }
      }
    }
  }
}

template <typename S>
void col2im_2d(const Mat<S>& col, int c_in, int h_in, int w_in, int k, int stride,
               int pad, int h_out, int w_out, Mat<S>& x) {
  x = Mat<S>::Zero(c_in, h_in * w_in);
  for (int oy = 0; oy < h_out; ++oy) {
    for (int ox = 0; ox < w_out; ++ox) {
      const int j = oy * w_out + ox;
      const int y0 = oy * stride - pad;
      const int x0 = ox * stride - pad;
      for (int u = 0; u < k; ++u) {
        const int yy = y0 + u;
        if (yy < 0 || yy >= h_in) continue;
        for (int v = 0; v < k; ++v) {
          const int xx = x0 + v;
          if (xx < 0 || xx >= w_in) continue;
          const int r0 = u * k + v;
          const int dst = yy * w_in + xx;
          for (int c = 0; c < c_in; ++c) x(c, dst) += col(c * k * k + r0, j);
        }
      }
    }
  }
}

}  // namespace vf::nn
