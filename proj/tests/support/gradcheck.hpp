#pragma once

#include <cmath>
#include <functional>

#include "vocalface/nn/param.hpp"
#include "vocalface/rng.hpp"

namespace vf::test {

// Central-difference gradient verification. The caller computes analytic
// gradients once (into the entries' grad matrices); `forward_loss` must
// re-evaluate the scalar loss from the current parameter values without
// touching persistent state (BN running stats stay frozen).
struct GradCheckReport {
  double max_rel_err = 0.0;
  int checked = 0;
};

inline double rel_err(double analytic, double numeric) {
  const double denom = std::max(1e-6, std::abs(analytic) + std::abs(numeric));
  return std::abs(analytic - numeric) / denom;
}

inline GradCheckReport check_grads(const nn::ParamList<double>& params,
                                   const std::function<double()>& forward_loss,
                                   Rng& rng, int samples_per_param = 24,
                                   double h = 1e-5) {
  GradCheckReport rep;
  for (const auto& p : params) {
    const int64_t n = p.value->size();
    const int64_t take = std::min<int64_t>(n, samples_per_param);
    for (int64_t s = 0; s < take; ++s) {
      const int64_t idx = take == n ? s : static_cast<int64_t>(rng.uniform_int(static_cast<uint64_t>(n)));
      double* coord = p.value->data() + idx;
      const double orig = *coord;
      *coord = orig + h;
      const double lp = forward_loss();
      *coord = orig - h;
      const double lm = forward_loss();
      *coord = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double analytic = p.grad->data()[idx];
      rep.max_rel_err = std::max(rep.max_rel_err, rel_err(analytic, numeric));
      ++rep.checked;
    }
  }
  return rep;
}

// Wrap a raw matrix as a pseudo-parameter so input gradients go through the
// same machinery.
template <typename S>
nn::ParamEntry<S> as_param(const std::string& name, Mat<S>& value, Mat<S>& grad) {
  return {name, &value, &grad};
}

template <typename S>
void randomize(Mat<S>& m, Rng& rng, double scale = 1.0) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) m(i, j) = static_cast<S>(rng.normal() * scale);
}

}  // namespace vf::test
