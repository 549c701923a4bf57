#pragma once

#include <string>
#include <vector>

#include "vocalface/rng.hpp"
#include "vocalface/types.hpp"

namespace vf::nn {

// A named, learnable tensor together with its gradient accumulator.
template <typename S>
struct ParamEntry {
  std::string name;
  Mat<S>* value = nullptr;
  Mat<S>* grad = nullptr;
};

template <typename S>
using ParamList = std::vector<ParamEntry<S>>;

// Non-learnable state that still belongs in checkpoints (BN running stats).
template <typename S>
struct BufferEntry {
  std::string name;
  Mat<S>* value = nullptr;
};

template <typename S>
using BufferList = std::vector<BufferEntry<S>>;

template <typename S>
void zero_grads(const ParamList<S>& ps) {
  for (const auto& p : ps) p.grad->setZero();
}

template <typename S>
int64_t param_count(const ParamList<S>& ps) {
  int64_t n = 0;
  for (const auto& p : ps) n += p.value->size();
  return n;
}

// Fan-in-scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename S>
void init_fan_in_uniform(Mat<S>& w, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (int j = 0; j < w.cols(); ++j)
    for (int i = 0; i < w.rows(); ++i)
      w(i, j) = static_cast<S>(rng.uniform(-bound, bound));
}

}  // namespace vf::nn
