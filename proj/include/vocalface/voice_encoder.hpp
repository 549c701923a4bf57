#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vocalface/nn/activations.hpp"
#include "vocalface/nn/batchnorm.hpp"
#include "vocalface/nn/conv1d.hpp"
#include "vocalface/nn/pool.hpp"

namespace vf {

// One 1D Inception module: four parallel convolution branches with kernel
// sizes 2/3/5/7 at stride 2, each Conv -> BN -> ReLU, concatenated along
// channels. Output channels split equally across the branches, so
// out_channels must be divisible by 4. Every branch halves time to
// ceil(t/2) under SAME padding.
template <typename S>
class InceptionBlock {
 public:
  static constexpr int kKernels[4] = {2, 3, 5, 7};

  InceptionBlock() = default;
  InceptionBlock(int in_ch, int out_ch) : in_ch_(in_ch), out_ch_(out_ch) {
    require(out_ch % 4 == 0, "InvalidValue",
            "inception output channels must be divisible by 4", 2);
    const int branch = out_ch / 4;
    for (int b = 0; b < 4; ++b) {
      conv_[b] = nn::Conv1dSame<S>(in_ch, branch, kKernels[b], 2);
      bn_[b] = nn::BatchNorm<S>(branch);
    }
  }

  void init(Rng& rng) {
    for (int b = 0; b < 4; ++b) conv_[b].init(rng);
  }

  SeqBatch<S> forward(const SeqBatch<S>& x, bool training, bool update_running = true) {
    const int branch = out_ch_ / 4;
    const int n = static_cast<int>(x.size());
    std::vector<SeqBatch<S>> branch_out(4);
    for (int b = 0; b < 4; ++b)
      branch_out[static_cast<size_t>(b)] =
          relu_[b].forward(bn_[b].forward(conv_[b].forward(x), training, update_running));
    SeqBatch<S> y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int t_out = static_cast<int>(branch_out[0][static_cast<size_t>(i)].cols());
      Mat<S>& yi = y[static_cast<size_t>(i)];
      yi.resize(out_ch_, t_out);
      for (int b = 0; b < 4; ++b)
        yi.middleRows(b * branch, branch) = branch_out[static_cast<size_t>(b)][static_cast<size_t>(i)];
    }
    return y;
  }

  SeqBatch<S> backward(const SeqBatch<S>& dy, bool param_grads = true) {
    const int branch = out_ch_ / 4;
    const int n = static_cast<int>(dy.size());
    SeqBatch<S> dx;
    for (int b = 0; b < 4; ++b) {
      SeqBatch<S> db(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        db[static_cast<size_t>(i)] = dy[static_cast<size_t>(i)].middleRows(b * branch, branch);
      SeqBatch<S> dxb = conv_[b].backward(
          bn_[b].backward(relu_[b].backward(db), param_grads), param_grads);
      if (b == 0) {
        dx = std::move(dxb);
      } else {
        for (int i = 0; i < n; ++i) dx[static_cast<size_t>(i)] += dxb[static_cast<size_t>(i)];
      }
    }
    return dx;
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    for (int b = 0; b < 4; ++b) {
      const std::string p = prefix + ".k" + std::to_string(kKernels[b]);
      conv_[b].params(out, p + ".conv");
      bn_[b].params(out, p + ".bn");
    }
  }

  void buffers(nn::BufferList<S>& out, const std::string& prefix) {
    for (int b = 0; b < 4; ++b)
      bn_[b].buffers(out, prefix + ".k" + std::to_string(kKernels[b]) + ".bn");
  }

  int out_channels() const { return out_ch_; }

 private:
  int in_ch_ = 0, out_ch_ = 0;
  nn::Conv1dSame<S> conv_[4];
  nn::BatchNorm<S> bn_[4];
  nn::ReLU<S> relu_[4];
};

// Common surface for the inception encoder and the plain-CNN ablation.
// encode() maps a batch of mel windows (bands x frames each) to a matrix of
// unit-norm column embeddings.
template <typename S>
class EncoderBase {
 public:
  virtual ~EncoderBase() = default;
  virtual Mat<S> encode(const SeqBatch<S>& mels, bool training,
                        bool update_running = true) = 0;
  virtual SeqBatch<S> backward(const Mat<S>& d_embed, bool param_grads = true) = 0;
  virtual void params(nn::ParamList<S>& out, const std::string& prefix) = 0;
  virtual void buffers(nn::BufferList<S>& out, const std::string& prefix) = 0;
  virtual void init(Rng& rng) = 0;
  virtual int embedding_dim() const = 0;
};

struct VoiceEncoderConfig {
  int in_channels = 40;
  std::vector<int> channels = {256, 384, 576, 864, 512};
};

// Stack of 1D Inception modules, time average pooling, L2 normalization.
// The embedding dimension equals the last stage's channel count.
template <typename S>
class VoiceEncoder final : public EncoderBase<S> {
 public:
  explicit VoiceEncoder(VoiceEncoderConfig cfg = {}) : cfg_(std::move(cfg)) {
    int in = cfg_.in_channels;
    for (int ch : cfg_.channels) {
      blocks_.emplace_back(in, ch);
      in = ch;
    }
  }

  void init(Rng& rng) override {
    for (auto& b : blocks_) b.init(rng);
  }

  Mat<S> encode(const SeqBatch<S>& mels, bool training, bool update_running = true) override {
    for (const auto& m : mels)
      if (static_cast<int>(m.rows()) != cfg_.in_channels)
        throw ShapeError("encoder expects " + std::to_string(cfg_.in_channels) +
                         " mel bands, got " + std::to_string(m.rows()));
    SeqBatch<S> h = mels;
    for (auto& b : blocks_) h = b.forward(h, training, update_running);
    pooled_ = pool_.forward(h);
    Mat<S> e(pooled_.rows(), pooled_.cols());
    for (int j = 0; j < e.cols(); ++j)
      e.col(j) = nn::l2_normalize(Vec<S>(pooled_.col(j)));
    embed_ = e;
    return e;
  }

  SeqBatch<S> backward(const Mat<S>& d_embed, bool param_grads = true) override {
    Mat<S> d_pool(d_embed.rows(), d_embed.cols());
    for (int j = 0; j < d_embed.cols(); ++j)
      d_pool.col(j) = nn::l2_normalize_backward(Vec<S>(pooled_.col(j)),
                                                Vec<S>(embed_.col(j)),
                                                Vec<S>(d_embed.col(j)));
    SeqBatch<S> dh = pool_.backward(d_pool);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      dh = it->backward(dh, param_grads);
    return dh;
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i].params(out, prefix + ".inc" + std::to_string(i + 1));
  }

  void buffers(nn::BufferList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i].buffers(out, prefix + ".inc" + std::to_string(i + 1));
  }

  int embedding_dim() const override { return cfg_.channels.back(); }

  // t sizes after each stage for an input of t0 frames
  std::vector<int> temporal_trace(int t0) const {
    std::vector<int> t{t0};
    for (size_t i = 0; i < blocks_.size(); ++i) t.push_back((t.back() + 1) / 2);
    return t;
  }

 private:
  VoiceEncoderConfig cfg_;
  std::vector<InceptionBlock<S>> blocks_;
  nn::TimeAvgPool<S> pool_;
  Mat<S> pooled_, embed_;
};

// Ablation encoder: same channel schedule, single kernel size 3, stride 2.
template <typename S>
class PlainCnnEncoder final : public EncoderBase<S> {
 public:
  explicit PlainCnnEncoder(VoiceEncoderConfig cfg = {}) : cfg_(std::move(cfg)) {
    int in = cfg_.in_channels;
    for (int ch : cfg_.channels) {
      conv_.emplace_back(in, ch, 3, 2);
      bn_.emplace_back(ch);
      in = ch;
    }
    relu_.resize(conv_.size());
  }

  void init(Rng& rng) override {
    for (auto& c : conv_) c.init(rng);
  }

  Mat<S> encode(const SeqBatch<S>& mels, bool training, bool update_running = true) override {
    SeqBatch<S> h = mels;
    for (size_t i = 0; i < conv_.size(); ++i)
      h = relu_[i].forward(bn_[i].forward(conv_[i].forward(h), training, update_running));
    pooled_ = pool_.forward(h);
    Mat<S> e(pooled_.rows(), pooled_.cols());
    for (int j = 0; j < e.cols(); ++j)
      e.col(j) = nn::l2_normalize(Vec<S>(pooled_.col(j)));
    embed_ = e;
    return e;
  }

  SeqBatch<S> backward(const Mat<S>& d_embed, bool param_grads = true) override {
    Mat<S> d_pool(d_embed.rows(), d_embed.cols());
    for (int j = 0; j < d_embed.cols(); ++j)
      d_pool.col(j) = nn::l2_normalize_backward(Vec<S>(pooled_.col(j)),
                                                Vec<S>(embed_.col(j)),
                                                Vec<S>(d_embed.col(j)));
    SeqBatch<S> dh = pool_.backward(d_pool);
    for (size_t i = conv_.size(); i-- > 0;)
      dh = conv_[i].backward(bn_[i].backward(relu_[i].backward(dh), param_grads), param_grads);
    return dh;
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < conv_.size(); ++i) {
      conv_[i].params(out, prefix + ".l" + std::to_string(i + 1) + ".conv");
      bn_[i].params(out, prefix + ".l" + std::to_string(i + 1) + ".bn");
    }
  }

  void buffers(nn::BufferList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < bn_.size(); ++i)
      bn_[i].buffers(out, prefix + ".l" + std::to_string(i + 1) + ".bn");
  }

  int embedding_dim() const override { return cfg_.channels.back(); }

 private:
  VoiceEncoderConfig cfg_;
  std::vector<nn::Conv1dSame<S>> conv_;
  std::vector<nn::BatchNorm<S>> bn_;
  std::vector<nn::ReLU<S>> relu_;
  nn::TimeAvgPool<S> pool_;
  Mat<S> pooled_, embed_;
};

}  // namespace vf
