#pragma once

#include <cmath>
#include <vector>

#include "vocalface/proxy_face_model.hpp"
#include "vocalface/types.hpp"

namespace vf {

// Weights of the conjugated loss: lambda1*L1 + lambda2*L_G + lambda3*L_C +
// lambda4*L_P.
struct LossWeights {
  double lambda1 = 10.0;   // image reconstruction
  double lambda2 = 1.0;    // adversarial
  double lambda3 = 0.05;   // auxiliary classifier
  double lambda4 = 100.0;  // perceptual
};

struct LossBreakdown {
  double l1 = 0.0;
  double l_g = 0.0;
  double l_c = 0.0;
  double l_p = 0.0;
  double conjugated = 0.0;
  // filled in multi-resolution training
  double l1_low = 0.0, l1_high = 0.0;
  double l_p_low = 0.0, l_p_high = 0.0;
};

inline constexpr double kProbEps = 1e-7;  // clamp inside every log

// -- reconstruction ---------------------------------------------------------

// Mean absolute pixel difference over the whole batch.
template <typename S>
S recon_l1(const PlaneBatch<S>& target, const PlaneBatch<S>& recon) {
  require(target.size() == recon.size() && target.channels == recon.channels &&
              target.height == recon.height && target.width == recon.width,
          "ShapeMismatch", "reconstruction loss shape mismatch");
  S total = S(0);
  int64_t count = 0;
  for (int i = 0; i < target.size(); ++i) {
    total += (target.maps[static_cast<size_t>(i)] - recon.maps[static_cast<size_t>(i)])
                 .cwiseAbs()
                 .sum();
    count += target.maps[static_cast<size_t>(i)].size();
  }
  return total / static_cast<S>(count);
}

template <typename S>
PlaneBatch<S> recon_l1_backward(const PlaneBatch<S>& target, const PlaneBatch<S>& recon,
                                S scale = S(1)) {
  PlaneBatch<S> d = recon;
  int64_t count = 0;
  for (int i = 0; i < target.size(); ++i) count += target.maps[static_cast<size_t>(i)].size();
  const S w = scale / static_cast<S>(count);
  for (int i = 0; i < target.size(); ++i)
    d.maps[static_cast<size_t>(i)] =
        (recon.maps[static_cast<size_t>(i)] - target.maps[static_cast<size_t>(i)])
            .array()
            .sign()
            .matrix() *
        w;
  return d;
}

// -- adversarial ------------------------------------------------------------

template <typename S>
S clamped_log(S p) {
  return std::log(std::max(p, static_cast<S>(kProbEps)));
}

// Discriminator loss: -[mean log D(x_real) + mean log(1 - D(x_fake))].
// p_* are the "real" probabilities assigned by the discriminator.
template <typename S>
S discriminator_loss(const Vec<S>& p_real_on_real, const Vec<S>& p_real_on_fake) {
  S a = S(0), b = S(0);
  for (int i = 0; i < p_real_on_real.size(); ++i) a += clamped_log(p_real_on_real(i));
  for (int i = 0; i < p_real_on_fake.size(); ++i)
    b += clamped_log(S(1) - p_real_on_fake(i));
  return -(a / static_cast<S>(p_real_on_real.size()) +
           b / static_cast<S>(p_real_on_fake.size()));
}

// Generator adversarial loss. Non-saturating by default: -mean log D(x_fake).
// The saturating toggle gives the literal minimax term mean log(1 - D(x_fake)).
template <typename S>
S generator_adv_loss(const Vec<S>& p_real_on_fake, bool saturating = false) {
  S acc = S(0);
  for (int i = 0; i < p_real_on_fake.size(); ++i) {
    if (saturating)
      acc += clamped_log(S(1) - p_real_on_fake(i));
    else
      acc -= clamped_log(p_real_on_fake(i));
  }
  return acc / static_cast<S>(p_real_on_fake.size());
}

// Convenience pair (d_loss, g_loss).
template <typename S>
std::pair<S, S> adversarial_terms(const Vec<S>& p_real_on_real,
                                  const Vec<S>& p_real_on_fake,
                                  bool saturating = false) {
  return {discriminator_loss(p_real_on_real, p_real_on_fake),
          generator_adv_loss(p_real_on_fake, saturating)};
}

// d(d_loss)/d(p) for a batch of real-probabilities; `on_real` selects which
// half of the loss the batch feeds. Gradients vanish outside the clamp.
template <typename S>
Vec<S> discriminator_loss_backward(const Vec<S>& p, bool on_real, S scale = S(1)) {
  const S n = static_cast<S>(p.size());
  Vec<S> d(p.size());
  for (int i = 0; i < p.size(); ++i) {
    if (on_real)
      d(i) = p(i) > static_cast<S>(kProbEps) ? -scale / (n * p(i)) : S(0);
    else
      d(i) = (S(1) - p(i)) > static_cast<S>(kProbEps) ? scale / (n * (S(1) - p(i))) : S(0);
  }
  return d;
}

template <typename S>
Vec<S> generator_adv_loss_backward(const Vec<S>& p, bool saturating = false, S scale = S(1)) {
  const S n = static_cast<S>(p.size());
  Vec<S> d(p.size());
  for (int i = 0; i < p.size(); ++i) {
    if (saturating)
      d(i) = (S(1) - p(i)) > static_cast<S>(kProbEps) ? -scale / (n * (S(1) - p(i))) : S(0);
    else
      d(i) = p(i) > static_cast<S>(kProbEps) ? -scale / (n * p(i)) : S(0);
  }
  return d;
}

// -- auxiliary classifier ----------------------------------------------------

// Mean categorical cross-entropy. probs is (classes, batch).
template <typename S>
S aux_class_loss(const Mat<S>& probs, const std::vector<int>& labels) {
  require(static_cast<int>(labels.size()) == probs.cols(), "ShapeMismatch",
          "one label per column required");
  S acc = S(0);
  for (int j = 0; j < probs.cols(); ++j) {
    const int y = labels[static_cast<size_t>(j)];
    if (y < 0 || y >= probs.rows())
      throw DataError("LabelOutOfRange", "label " + std::to_string(y) + " outside [0, " +
                                             std::to_string(probs.rows()) + ")");
    acc -= clamped_log(probs(y, j));
  }
  return acc / static_cast<S>(probs.cols());
}

template <typename S>
Mat<S> aux_class_loss_backward(const Mat<S>& probs, const std::vector<int>& labels,
                               S scale = S(1)) {
  Mat<S> d = Mat<S>::Zero(probs.rows(), probs.cols());
  const S n = static_cast<S>(probs.cols());
  for (int j = 0; j < probs.cols(); ++j) {
    const int y = labels[static_cast<size_t>(j)];
    if (probs(y, j) > static_cast<S>(kProbEps)) d(y, j) = -scale / (n * probs(y, j));
  }
  return d;
}

// -- perceptual ---------------------------------------------------------------

// Mean absolute difference between frozen-embedder features of the target and
// the reconstruction.
template <typename S>
S perceptual_loss(const Mat<S>& embed_target, const Mat<S>& embed_recon) {
  require(embed_target.rows() == embed_recon.rows() &&
              embed_target.cols() == embed_recon.cols(),
          "ShapeMismatch", "perceptual feature shapes differ");
  return (embed_target - embed_recon).cwiseAbs().sum() /
         static_cast<S>(embed_target.size());
}

template <typename S>
Mat<S> perceptual_loss_backward(const Mat<S>& embed_target, const Mat<S>& embed_recon,
                                S scale = S(1)) {
  const S w = scale / static_cast<S>(embed_target.size());
  return (embed_recon - embed_target).array().sign().matrix() * w;
}

// -- conjugation --------------------------------------------------------------

inline double conjugate(const LossBreakdown& b, const LossWeights& w) {
  const double terms[4] = {b.l1, b.l_g, b.l_c, b.l_p};
  const double lam[4] = {w.lambda1, w.lambda2, w.lambda3, w.lambda4};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(terms[i]))
      throw Error("NonFinite", "loss term " + std::to_string(i + 1) + " is not finite", 4);
    acc += lam[i] * terms[i];
  }
  return acc;
}

}  // namespace vf
