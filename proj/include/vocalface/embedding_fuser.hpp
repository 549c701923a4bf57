#pragma once

#include <string>
#include <vector>

#include "vocalface/nn/activations.hpp"
#include "vocalface/nn/param.hpp"

namespace vf {

// Bilinear self-attention fuser. For a window-embedding sequence E (columns
// e_1..e_T):
//   scores[i][j] = e_i' * W_a * e_j
//   beta[i]      = softmax over row i
//   a_i          = sum_j beta[i][j] e_j
//   f_i          = W_f [a_i; e_i] + b_f
//   f            = l2_normalize(mean_i f_i)
template <typename S>
struct FuserParams {
  Mat<S> w_attn;  // d x d
  Mat<S> w_proj;  // d x 2d
  Mat<S> b_proj;  // d x 1
  Mat<S> g_attn, g_proj, g_bias;

  explicit FuserParams(int d = 512) {
    w_attn = Mat<S>::Zero(d, d);
    w_proj = Mat<S>::Zero(d, 2 * d);
    b_proj = Mat<S>::Zero(d, 1);
    g_attn = Mat<S>::Zero(d, d);
    g_proj = Mat<S>::Zero(d, 2 * d);
    g_bias = Mat<S>::Zero(d, 1);
  }

  int dim() const { return static_cast<int>(w_attn.rows()); }

  // At this init the fuser reproduces plain mean pooling exactly: W_a = 0
  // gives uniform attention, and [I/2, I/2] averages a_i with e_i.
  void init_mean_pooling() {
    const int d = dim();
    w_attn.setZero();
    w_proj << Mat<S>::Identity(d, d) * S(0.5), Mat<S>::Identity(d, d) * S(0.5);
    b_proj.setZero();
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".W_a", &w_attn, &g_attn});
    out.push_back({prefix + ".W_f", &w_proj, &g_proj});
    out.push_back({prefix + ".b_f", &b_proj, &g_bias});
  }
};

template <typename S>
struct AttendResult {
  Mat<S> scores;    // T x T
  Mat<S> weights;   // T x T, each row a probability vector
  Mat<S> attended;  // d x T, column i = a_i
};

template <typename S>
Mat<S> softmax_rows(const Mat<S>& scores) {
  Mat<S> w(scores.rows(), scores.cols());
  for (int i = 0; i < scores.rows(); ++i) {
    const S m = scores.row(i).maxCoeff();
    w.row(i) = (scores.row(i).array() - m).exp().matrix();
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

template <typename S>
AttendResult<S> attend(const Mat<S>& embeddings, const FuserParams<S>& p) {
  const int d = p.dim();
  if (static_cast<int>(embeddings.rows()) != d)
    throw ShapeError("fuser dimension " + std::to_string(d) + " != embedding rows " +
                         std::to_string(embeddings.rows()),
                     "DimMismatch");
  require(embeddings.cols() >= 1, "DimMismatch", "empty embedding sequence");
  AttendResult<S> r;
  r.scores.noalias() = embeddings.transpose() * p.w_attn * embeddings;
  r.weights = softmax_rows(r.scores);
  r.attended.noalias() = embeddings * r.weights.transpose();
  return r;
}

template <typename S>
struct FuseCache {
  Mat<S> embeddings;  // d x T
  AttendResult<S> att;
  Mat<S> concat;  // 2d x T
  Vec<S> pooled;  // pre-normalization mean of f_i
  Vec<S> fused;
};

template <typename S>
Vec<S> fuse(const Mat<S>& embeddings, const FuserParams<S>& p, FuseCache<S>* cache = nullptr) {
  const int d = p.dim();
  const int t = static_cast<int>(embeddings.cols());
  AttendResult<S> att = attend(embeddings, p);
  Mat<S> concat(2 * d, t);
  concat.topRows(d) = att.attended;
  concat.bottomRows(d) = embeddings;
  Mat<S> f_i = p.w_proj * concat;
  f_i.colwise() += p.b_proj.col(0);
  Vec<S> pooled = f_i.rowwise().mean();
  Vec<S> fused = nn::l2_normalize(pooled);
  if (cache) {
    cache->embeddings = embeddings;
    cache->att = std::move(att);
    cache->concat = std::move(concat);
    cache->pooled = std::move(pooled);
    cache->fused = fused;
  }
  return fused;
}

// Pullback of fuse(). Accumulates parameter gradients into p and returns
// d(loss)/d(embeddings).
template <typename S>
Mat<S> fuse_backward(const FuseCache<S>& c, FuserParams<S>& p, const Vec<S>& d_fused,
                     bool param_grads = true) {
  const int d = p.dim();
  const int t = static_cast<int>(c.embeddings.cols());
  const Vec<S> d_pooled = nn::l2_normalize_backward(c.pooled, c.fused, d_fused);
  // dF columns are all d_pooled / T
  const Mat<S> d_f = (d_pooled / static_cast<S>(t)) * Mat<S>::Ones(1, t);
  if (param_grads) {
    p.g_proj.noalias() += d_f * c.concat.transpose();
    p.g_bias.col(0) += d_pooled;
  }
  Mat<S> d_concat = p.w_proj.transpose() * d_f;
  Mat<S> d_att = d_concat.topRows(d);
  Mat<S> d_embed = d_concat.bottomRows(d);

  // attended = E * weights'
  d_embed.noalias() += d_att * c.att.weights;
  Mat<S> d_weights = d_att.transpose() * c.embeddings;  // T x T
  // softmax rows
  Mat<S> d_scores(t, t);
  for (int i = 0; i < t; ++i) {
    const S dot = c.att.weights.row(i).dot(d_weights.row(i));
    d_scores.row(i) =
        (c.att.weights.row(i).array() * (d_weights.row(i).array() - dot)).matrix();
  }
  if (param_grads) p.g_attn.noalias() += c.embeddings * d_scores * c.embeddings.transpose();
  d_embed.noalias() += p.w_attn * c.embeddings * d_scores.transpose();
  d_embed.noalias() += p.w_attn.transpose() * c.embeddings * d_scores;
  return d_embed;
}

// Fuser-free pooling used by the no-fuser evaluation path.
template <typename S>
Vec<S> mean_pool_normalize(const Mat<S>& embeddings) {
  return nn::l2_normalize(Vec<S>(embeddings.rowwise().mean()));
}

}  // namespace vf
