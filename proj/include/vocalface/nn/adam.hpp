#pragma once

#include <cmath>
#include <vector>

#include "vocalface/nn/param.hpp"

namespace vf::nn {

// Adaptive-moment optimizer over a parameter list.
template <typename S>
class Adam {
 public:
  struct Options {
    S lr = S(5e-4);
    S beta1 = S(0.9);
    S beta2 = S(0.98);
    S eps = S(1e-8);
  };

  Adam() = default;
  Adam(const ParamList<S>& params, Options opt) : params_(params), opt_(opt) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(Mat<S>::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Mat<S>::Zero(p.value->rows(), p.value->cols()));
    }
  }

  void step() {
    ++t_;
    const S bc1 = S(1) - std::pow(opt_.beta1, static_cast<S>(t_));
    const S bc2 = S(1) - std::pow(opt_.beta2, static_cast<S>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      const Mat<S>& g = *params_[i].grad;
      m_[i] = opt_.beta1 * m_[i] + (S(1) - opt_.beta1) * g;
      v_[i] = (opt_.beta2 * v_[i].array() + (S(1) - opt_.beta2) * g.array().square()).matrix();
      params_[i].value->array() -=
          opt_.lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + opt_.eps);
    }
  }

  int64_t iterations() const { return t_; }

  // Serialized alongside checkpoints so training resumes exactly.
  struct StateRef {
    std::string name;
    Mat<S>* m;
    Mat<S>* v;
  };
  std::vector<StateRef> state() {
    std::vector<StateRef> out;
    for (size_t i = 0; i < params_.size(); ++i)
      out.push_back({params_[i].name, &m_[i], &v_[i]});
    return out;
  }
  void set_iterations(int64_t t) { t_ = t; }

 private:
  ParamList<S> params_;
  Options opt_;
  std::vector<Mat<S>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace vf::nn
