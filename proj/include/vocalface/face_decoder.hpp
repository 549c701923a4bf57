#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vocalface/nn/activations.hpp"
#include "vocalface/nn/batchnorm.hpp"
#include "vocalface/nn/conv2d.hpp"
#include "vocalface/nn/upsample.hpp"

namespace vf {

// Upsampling block: 2x bilinear upsample -> Conv 3x3 (stride 1, pad 1) ->
// ReLU -> BatchNorm. Doubles the spatial size, maps in_ch to out_ch.
template <typename S>
class UpBlock {
 public:
  UpBlock() = default;
  UpBlock(int in_ch, int out_ch)
      : conv_(in_ch, out_ch, 3, 1, 1, /*bias=*/true), bn_(out_ch) {}

  void init(Rng& rng) { conv_.init(rng); }

  PlaneBatch<S> forward(const PlaneBatch<S>& x, bool training, bool update_running = true) {
    PlaneBatch<S> h = conv_.forward(up_.forward(x));
    h.maps = bn_.forward(relu_.forward(h.maps), training, update_running);
    return h;
  }

  PlaneBatch<S> backward(const PlaneBatch<S>& dy, bool param_grads = true) {
    PlaneBatch<S> d = dy;
    d.maps = relu_.backward(bn_.backward(dy.maps, param_grads));
    return up_.backward(conv_.backward(d, param_grads));
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    conv_.params(out, prefix + ".conv");
    bn_.params(out, prefix + ".bn");
  }
  void buffers(nn::BufferList<S>& out, const std::string& prefix) {
    bn_.buffers(out, prefix + ".bn");
  }

  int out_channels() const { return conv_.out_channels(); }

 private:
  nn::Upsample2xBilinear<S> up_;
  nn::Conv2d<S> conv_;
  nn::ReLU<S> relu_;
  nn::BatchNorm<S> bn_;
};

template <typename S>
class DecoderBase {
 public:
  virtual ~DecoderBase() = default;
  virtual PlaneBatch<S> decode(const Mat<S>& embeds, bool training,
                               bool update_running = true) = 0;
  virtual Mat<S> backward(const PlaneBatch<S>& d_img, bool param_grads = true) = 0;
  virtual void params(nn::ParamList<S>& out, const std::string& prefix) = 0;
  virtual void buffers(nn::BufferList<S>& out, const std::string& prefix) = 0;
  virtual void init(Rng& rng) = 0;
  virtual int resolution() const = 0;
};

struct FaceDecoderConfig {
  int embed_dim = 512;
  // channel schedule reaching 64x64; a 128x128 decoder appends one more block
  std::vector<int> channels = {1024, 512, 256, 128, 64, 32};
  int high_channels = 16;  // channels of the appended 128x128 block
  int resolution = 64;     // 64 or 128
  bool multi_resolution = false;
};

// Upsample-convolve face decoder. The embedding is reshaped to d x 1 x 1 and
// doubled up to the target resolution; a 1x1 convolution with linear
// activation emits RGB. In multi-resolution mode the trunk through block 6
// feeds a 64x64 head, and block 7 continues to a 128x128 head.
template <typename S>
class FaceDecoder final : public DecoderBase<S> {
 public:
  explicit FaceDecoder(FaceDecoderConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.resolution != 64 && cfg_.resolution != 128)
      throw ConfigError("BadResolution", "decoder resolution must be 64 or 128");
    if (cfg_.multi_resolution && cfg_.resolution != 128)
      throw ConfigError("BadResolution", "multi-resolution decoding targets 128");
    std::vector<int> chans = cfg_.channels;
    if (cfg_.resolution == 128) chans.push_back(cfg_.high_channels);
    int in = cfg_.embed_dim;
    for (int ch : chans) {
      blocks_.emplace_back(in, ch);
      in = ch;
    }
    if (cfg_.multi_resolution) {
      head_low_ = nn::Conv2d<S>(cfg_.channels.back(), 3, 1, 1, 0, true);
      head_ = nn::Conv2d<S>(cfg_.high_channels, 3, 1, 1, 0, true);
    } else {
      head_ = nn::Conv2d<S>(chans.back(), 3, 1, 1, 0, true);
    }
  }

  void init(Rng& rng) override {
    for (auto& b : blocks_) b.init(rng);
    head_.init(rng);
    if (cfg_.multi_resolution) head_low_.init(rng);
  }

  PlaneBatch<S> decode(const Mat<S>& embeds, bool training, bool update_running = true) override {
    require(!cfg_.multi_resolution, "BadResolution",
            "decoder is multi-resolution; call decode_multi", 2);
    PlaneBatch<S> h = run_trunk(embeds, blocks_.size(), training, update_running);
    return head_.forward(h);
  }

  Mat<S> backward(const PlaneBatch<S>& d_img, bool param_grads = true) override {
    PlaneBatch<S> d = head_.backward(d_img, param_grads);
    for (size_t i = blocks_.size(); i-- > 0;) d = blocks_[i].backward(d, param_grads);
    return collapse(d);
  }

  // (64x64, 128x128) image pair from the shared trunk.
  std::pair<PlaneBatch<S>, PlaneBatch<S>> decode_multi(const Mat<S>& embeds, bool training,
                                                       bool update_running = true) {
    require(cfg_.multi_resolution, "BadResolution", "decoder is single-resolution", 2);
    const size_t n_low = blocks_.size() - 1;
    PlaneBatch<S> h64 = run_trunk(embeds, n_low, training, update_running);
    PlaneBatch<S> low = head_low_.forward(h64);
    PlaneBatch<S> h128 = blocks_.back().forward(h64, training, update_running);
    PlaneBatch<S> high = head_.forward(h128);
    return {std::move(low), std::move(high)};
  }

  Mat<S> backward_multi(const PlaneBatch<S>& d_low, const PlaneBatch<S>& d_high,
                        bool param_grads = true) {
    PlaneBatch<S> d = blocks_.back().backward(head_.backward(d_high, param_grads), param_grads);
    PlaneBatch<S> d_from_low = head_low_.backward(d_low, param_grads);
    for (int i = 0; i < d.size(); ++i)
      d.maps[static_cast<size_t>(i)] += d_from_low.maps[static_cast<size_t>(i)];
    for (size_t i = blocks_.size() - 1; i-- > 0;) d = blocks_[i].backward(d, param_grads);
    return collapse(d);
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i].params(out, prefix + ".up" + std::to_string(i + 1));
    head_.params(out, prefix + ".head");
    if (cfg_.multi_resolution) head_low_.params(out, prefix + ".head_low");
  }

  void buffers(nn::BufferList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < blocks_.size(); ++i)
      blocks_[i].buffers(out, prefix + ".up" + std::to_string(i + 1));
  }

  int resolution() const override { return cfg_.resolution; }

  // spatial sizes 1, 2, 4, ... after each block
  std::vector<int> spatial_trace() const {
    std::vector<int> t{1};
    for (size_t i = 0; i < blocks_.size(); ++i) t.push_back(t.back() * 2);
    return t;
  }

 private:
  PlaneBatch<S> run_trunk(const Mat<S>& embeds, size_t n_blocks, bool training,
                          bool update_running) {
    if (static_cast<int>(embeds.rows()) != cfg_.embed_dim)
      throw ShapeError("decoder expects dim " + std::to_string(cfg_.embed_dim) +
                       ", got " + std::to_string(embeds.rows()));
    PlaneBatch<S> h;
    h.channels = cfg_.embed_dim;
    h.height = 1;
    h.width = 1;
    h.maps.resize(static_cast<size_t>(embeds.cols()));
    for (int i = 0; i < embeds.cols(); ++i) h.maps[static_cast<size_t>(i)] = embeds.col(i);
    for (size_t i = 0; i < n_blocks; ++i)
      h = blocks_[i].forward(h, training, update_running);
    return h;
  }

  Mat<S> collapse(const PlaneBatch<S>& d) const {
    Mat<S> out(cfg_.embed_dim, d.size());
    for (int i = 0; i < d.size(); ++i) out.col(i) = d.maps[static_cast<size_t>(i)].col(0);
    return out;
  }

  FaceDecoderConfig cfg_;
  std::vector<UpBlock<S>> blocks_;
  nn::Conv2d<S> head_, head_low_;
};

// Ablation decoder: stride-2 transposed convolutions with the same channel
// schedule and output shapes.
template <typename S>
class DeconvDecoder final : public DecoderBase<S> {
 public:
  explicit DeconvDecoder(FaceDecoderConfig cfg = {}) : cfg_(std::move(cfg)) {
    require(!cfg_.multi_resolution, "BadResolution",
            "deconv baseline is single-resolution", 2);
    std::vector<int> chans = cfg_.channels;
    if (cfg_.resolution == 128) chans.push_back(cfg_.high_channels);
    int in = cfg_.embed_dim;
    for (int ch : chans) {
      deconv_.emplace_back(in, ch, 4, 2, 1, true);
      bn_.emplace_back(ch);
      in = ch;
    }
    relu_.resize(deconv_.size());
    head_ = nn::Conv2d<S>(chans.back(), 3, 1, 1, 0, true);
  }

  void init(Rng& rng) override {
    for (auto& d : deconv_) d.init(rng);
    head_.init(rng);
  }

  PlaneBatch<S> decode(const Mat<S>& embeds, bool training, bool update_running = true) override {
    PlaneBatch<S> h;
    h.channels = cfg_.embed_dim;
    h.height = 1;
    h.width = 1;
    h.maps.resize(static_cast<size_t>(embeds.cols()));
    for (int i = 0; i < embeds.cols(); ++i) h.maps[static_cast<size_t>(i)] = embeds.col(i);
    for (size_t i = 0; i < deconv_.size(); ++i) {
      h = deconv_[i].forward(h);
      h.maps = bn_[i].forward(relu_[i].forward(h.maps), training, update_running);
    }
    return head_.forward(h);
  }

  Mat<S> backward(const PlaneBatch<S>& d_img, bool param_grads = true) override {
    PlaneBatch<S> d = head_.backward(d_img, param_grads);
    for (size_t i = deconv_.size(); i-- > 0;) {
      d.maps = relu_[i].backward(bn_[i].backward(d.maps, param_grads));
      d = deconv_[i].backward(d, param_grads);
    }
    Mat<S> out(cfg_.embed_dim, d.size());
    for (int i = 0; i < d.size(); ++i) out.col(i) = d.maps[static_cast<size_t>(i)].col(0);
    return out;
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < deconv_.size(); ++i) {
      deconv_[i].params(out, prefix + ".deconv" + std::to_string(i + 1));
      bn_[i].params(out, prefix + ".deconv" + std::to_string(i + 1) + ".bn");
    }
    head_.params(out, prefix + ".head");
  }

  void buffers(nn::BufferList<S>& out, const std::string& prefix) override {
    for (size_t i = 0; i < bn_.size(); ++i)
      bn_[i].buffers(out, prefix + ".deconv" + std::to_string(i + 1) + ".bn");
  }

  int resolution() const override { return cfg_.resolution; }

 private:
  FaceDecoderConfig cfg_;
  std::vector<nn::ConvTranspose2d<S>> deconv_;
  std::vector<nn::BatchNorm<S>> bn_;
  std::vector<nn::ReLU<S>> relu_;
  nn::Conv2d<S> head_;
};

}  // namespace vf
