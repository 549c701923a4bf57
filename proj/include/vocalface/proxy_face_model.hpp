#pragma once

#include <string>
#include <vector>

#include "vocalface/discriminators.hpp"

namespace vf {

struct ProxyConfig {
  std::vector<int> channels = {16, 32, 64};
  int extra_channels_128 = 128;
  int embed_dim = 64;
  int n_classes = 2;
  int resolution = 64;
};

// Small convolutional identity classifier standing in for an externally
// pretrained face embedder. The penultimate layer (L2-normalized) is the
// face embedding used by the perceptual loss and the similarity metrics;
// the softmax head provides the posteriors used by the quality score.
template <typename S>
class ProxyFaceModel {
 public:
  explicit ProxyFaceModel(ProxyConfig cfg = {}) : cfg_(std::move(cfg)) {
    std::vector<int> chans = cfg_.channels;
    if (cfg_.resolution == 128) chans.push_back(cfg_.extra_channels_128);
    trunk_ = ConvTrunk<S>(3, chans);
    fc_embed_ = nn::Linear<S>(chans.back(), cfg_.embed_dim);
    fc_class_ = nn::Linear<S>(cfg_.embed_dim, cfg_.n_classes);
  }

  void init(Rng& rng) {
    trunk_.init(rng);
    fc_embed_.init(rng);
    fc_class_.init(rng);
  }

  // Unit-norm embeddings, (embed_dim, batch).
  Mat<S> embed(const PlaneBatch<S>& imgs, bool training = false,
               bool update_running = true) {
    Mat<S> feat = trunk_.forward(imgs, training, update_running);
    raw_ = fc_embed_.forward(feat);
    embeds_.resize(raw_.rows(), raw_.cols());
    for (int j = 0; j < raw_.cols(); ++j)
      embeds_.col(j) = nn::l2_normalize(Vec<S>(raw_.col(j)));
    return embeds_;
  }

  // Identity posteriors, (n_classes, batch). Runs the embedding path.
  Mat<S> posterior(const PlaneBatch<S>& imgs, bool training = false,
                   bool update_running = true) {
    embed(imgs, training, update_running);
    probs_ = nn::softmax_cols(fc_class_.forward(embeds_));
    return probs_;
  }

  // Pullback from the embedding into the input image. The perceptual loss
  // calls this with param_grads=false so the proxy stays frozen.
  PlaneBatch<S> backward_from_embedding(const Mat<S>& d_embed, bool param_grads = false) {
    Mat<S> d_raw(raw_.rows(), raw_.cols());
    for (int j = 0; j < raw_.cols(); ++j)
      d_raw.col(j) = nn::l2_normalize_backward(Vec<S>(raw_.col(j)), Vec<S>(embeds_.col(j)),
                                               Vec<S>(d_embed.col(j)));
    Mat<S> d_feat = fc_embed_.backward(d_raw, param_grads);
    return trunk_.backward(d_feat, param_grads);
  }

  PlaneBatch<S> backward_from_posterior(const Mat<S>& d_probs, bool param_grads = true) {
    Mat<S> d_logits = nn::softmax_cols_backward(probs_, d_probs);
    Mat<S> d_embed = fc_class_.backward(d_logits, param_grads);
    return backward_from_embedding(d_embed, param_grads);
  }

  void params(nn::ParamList<S>& out, const std::string& prefix) {
    trunk_.params(out, prefix + ".trunk");
    fc_embed_.params(out, prefix + ".fc_embed");
    fc_class_.params(out, prefix + ".fc_class");
  }
  void buffers(nn::BufferList<S>& out, const std::string& prefix) {
    trunk_.buffers(out, prefix + ".trunk");
  }

  int embed_dim() const { return cfg_.embed_dim; }
  int n_classes() const { return cfg_.n_classes; }
  int resolution() const { return cfg_.resolution; }
  const ProxyConfig& config() const { return cfg_; }

 private:
  ProxyConfig cfg_;
  ConvTrunk<S> trunk_;
  nn::Linear<S> fc_embed_, fc_class_;
  Mat<S> raw_, embeds_, probs_;
};

}  // namespace vf
