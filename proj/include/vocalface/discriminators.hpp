#pragma once

#include <string>
#include <vector>

#include "vocalface/nn/activations.hpp"
#include "vocalface/nn/batchnorm.hpp"
#include "vocalface/nn/conv2d.hpp"
#include "vocalface/nn/linear.hpp"
#include "vocalface/nn/pool.hpp"

namespace vf {

// Shared convolutional trunk: Conv 4x4 (stride 2, pad 1) -> BN -> ReLU per
// stage, then global average pooling to a feature column per sample.
template <typename S>
class ConvTrunk {
 public:
  ConvTrunk() = default;
  ConvTrunk(int in_ch, const std::vector<int>& channels) {
    int in = in_ch;
    for (int ch : channels) {
      conv_.emplace_back(in, ch, 4, 2, 1, /*bias=*/false);
      bn_.emplace_back(ch);
      in = ch;
    }
    relu_.resize(conv_.size());
  }

  void init(Rng& rng) {
    for (auto& c : conv_) c.init(rng);
  }

  Mat<S> forward(const PlaneBatch<S>& x, bool training, bool update_running = true) {
    PlaneBatch<S> h = x;
    for (size_t i = 0; i < conv_.size(); ++i) {
      h = conv_[i].forward(h);
      h.maps = relu_[i].forward(bn_[i].forward(h.maps, training, update_running));
    }
    pre_pool_shape_ = {h.channels, h.height, h.width};
    return pool_.forward(h);
  }

  PlaneBatch<S> backward(const Mat<S>& d_feat, bool param_grads = true) {
    PlaneBatch<S> d = pool_.backward(d_feat);
    for (size_t i = conv_.size(); i-- > 0;) {
      d.maps = bn_[i].backward(relu_[i].backward(d.maps), param_grads);
      d = conv_[i].backward(d, param_grads);
    }
    return d;
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    for (size_t i = 0; i < conv_.size(); ++i) {
      conv_[i].params(out, prefix + ".c" + std::to_string(i + 1));
      bn_[i].params(out, prefix + ".c" + std::to_string(i + 1) + ".bn");
    }
  }
  void buffers(nn::BufferList<S>& out, const std::string& prefix) {
    for (size_t i = 0; i < bn_.size(); ++i)
      bn_[i].buffers(out, prefix + ".c" + std::to_string(i + 1) + ".bn");
  }

  int out_channels() const { return conv_.back().out_channels(); }
  // (channels, height, width) entering the average pool on the last forward
  std::array<int, 3> pre_pool_shape() const { return pre_pool_shape_; }

 private:
  std::vector<nn::Conv2d<S>> conv_;
  std::vector<nn::BatchNorm<S>> bn_;
  std::vector<nn::ReLU<S>> relu_;
  nn::GlobalAvgPool2d<S> pool_;
  std::array<int, 3> pre_pool_shape_{0, 0, 0};
};

struct DiscriminatorConfig {
  std::vector<int> channels = {64, 128, 256};  // 64x64 inputs
  int extra_channels_128 = 512;  // appended stage for 128x128 inputs
  int fc_dim = 1024;
  int resolution = 64;
  int out_classes = 2;  // 2 for real/fake, N_id for the identity classifier
};

// Convolutional classifier used for both adversaries: trunk, average pool,
// Linear 1024 + ReLU, Linear d_o + softmax. Output columns are probability
// vectors; for the real/fake discriminator index 0 means "real".
template <typename S>
class Discriminator {
 public:
  explicit Discriminator(DiscriminatorConfig cfg = {}) : cfg_(std::move(cfg)) {
    std::vector<int> chans = cfg_.channels;
    if (cfg_.resolution == 128) chans.push_back(cfg_.extra_channels_128);
    trunk_ = ConvTrunk<S>(3, chans);
    fc1_ = nn::Linear<S>(chans.back(), cfg_.fc_dim);
    fc2_ = nn::Linear<S>(cfg_.fc_dim, cfg_.out_classes);
  }

  void init(Rng& rng) {
    trunk_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng);
  }

  // probabilities, (out_classes, batch)
  Mat<S> forward(const PlaneBatch<S>& imgs, bool training, bool update_running = true) {
    if (imgs.height != cfg_.resolution || imgs.width != cfg_.resolution ||
        imgs.channels != 3)
      throw ShapeError("discriminator built for 3x" + std::to_string(cfg_.resolution) +
                       "x" + std::to_string(cfg_.resolution));
    Mat<S> feat = trunk_.forward(imgs, training, update_running);
    hidden_ = fc1_.forward(feat);
    Mat<S> act = hidden_.cwiseMax(S(0));
    probs_ = nn::softmax_cols(fc2_.forward(act));
    return probs_;
  }

  PlaneBatch<S> backward(const Mat<S>& d_probs, bool param_grads = true) {
    Mat<S> d_logits = nn::softmax_cols_backward(probs_, d_probs);
    Mat<S> d_act = fc2_.backward(d_logits, param_grads);
    Mat<S> d_hidden =
        (d_act.array() * (hidden_.array() > S(0)).template cast<S>()).matrix();
    Mat<S> d_feat = fc1_.backward(d_hidden, param_grads);
    return trunk_.backward(d_feat, param_grads);
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    trunk_.params(out, prefix + ".trunk");
    fc1_.params(out, prefix + ".fc1");
    fc2_.params(out, prefix + ".fc2");
  }
  void buffers(nn::BufferList<S>& out, const std::string& prefix) {
    trunk_.buffers(out, prefix + ".trunk");
  }

  std::array<int, 3> pre_pool_shape() const { return trunk_.pre_pool_shape(); }
  int out_classes() const { return cfg_.out_classes; }
  int resolution() const { return cfg_.resolution; }

 private:
  DiscriminatorConfig cfg_;
  ConvTrunk<S> trunk_;
  nn::Linear<S> fc1_, fc2_;
  Mat<S> hidden_, probs_;
};

// (real, fake) probability pair per image
template <typename S>
Mat<S> judge_real(Discriminator<S>& d, const PlaneBatch<S>& imgs, bool training = false) {
  require(d.out_classes() == 2, "ShapeMismatch", "judge_real needs a 2-way head");
  return d.forward(imgs, training);
}

// probability simplex over identities per image
template <typename S>
Mat<S> classify_identity(Discriminator<S>& d, const PlaneBatch<S>& imgs,
                         bool training = false) {
  require(d.out_classes() >= 2, "ShapeMismatch", "identity head needs >= 2 classes");
  return d.forward(imgs, training);
}

}  // namespace vf
