#pragma once

#include "ssagcn/tensor.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ssagcn {

enum class OptKind { SGD, Adam, Adagrad };

inline const char* to_string(OptKind k) {
  switch (k) {
    case OptKind::SGD: return "sgd";
    case OptKind::Adam: return "adam";
    case OptKind::Adagrad: return "adagrad";
  }
  return "?";
}

// Per-parameter state for SGD / Adam / Adagrad. Buffers are allocated lazily
// on the first step so the optimizer can be constructed before the parameter
// list is final. Grads are zeroed after every step.
template <typename Scalar>
class Optimizer {
 public:
  Optimizer(OptKind kind, Scalar learning_rate, Scalar weight_decay = Scalar(0))
      : kind_(kind), lr_(learning_rate), weight_decay_(weight_decay) {}

  OptKind kind() const { return kind_; }
  long step_count() const { return step_count_; }

  void step(std::vector<Tensor<Scalar>>& params) {
    if (buffers_a_.empty()) allocate(params);
    if (params.size() != buffers_a_.size())
      throw ValueError("optimizer: parameter list changed size");
    ++step_count_;
    for (size_t k = 0; k < params.size(); ++k) {
      auto& p = params[k];
      if (!p.has_grad()) throw ValueError("optimizer: parameter " + std::to_string(k) +
                                          " has no gradient");
      DenseMatrix<Scalar> g = p.grad();
      if (weight_decay_ != Scalar(0)) g += weight_decay_ * p.value();
      switch (kind_) {
        case OptKind::SGD:
          p.value_mut() -= lr_ * g;
          break;
        case OptKind::Adagrad: {
          buffers_a_[k] += g.cwiseProduct(g);
          p.value_mut().array() -=
              lr_ * g.array() / (buffers_a_[k].array().sqrt() + Scalar(kAdagradEps));
          break;
        }
        case OptKind::Adam: {
          auto& m = buffers_a_[k];
          auto& v = buffers_b_[k];
          m = Scalar(kBeta1) * m + Scalar(1 - kBeta1) * g;
          v = Scalar(kBeta2) * v + Scalar(1 - kBeta2) * g.cwiseProduct(g);
          const Scalar bc1 = Scalar(1) - Scalar(std::pow(kBeta1, double(step_count_)));
          const Scalar bc2 = Scalar(1) - Scalar(std::pow(kBeta2, double(step_count_)));
          p.value_mut().array() -= lr_ * (m.array() / bc1) /
                                   ((v.array() / bc2).sqrt() + Scalar(kAdamEps));
          break;
        }
      }
      p.zero_grad();
    }
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kAdamEps = 1e-8;
  static constexpr double kAdagradEps = 1e-10;

 private:
  void allocate(const std::vector<Tensor<Scalar>>& params) {
    for (auto& p : params) {
      buffers_a_.push_back(DenseMatrix<Scalar>::Zero(p.rows(), p.cols()));
      if (kind_ == OptKind::Adam)
        buffers_b_.push_back(DenseMatrix<Scalar>::Zero(p.rows(), p.cols()));
    }
  }

  OptKind kind_;
  Scalar lr_;
  Scalar weight_decay_;
  long step_count_ = 0;
  std::vector<DenseMatrix<Scalar>> buffers_a_;  // Adagrad accumulator / Adam first moment
  std::vector<DenseMatrix<Scalar>> buffers_b_;  // Adam second moment
};

}  // namespace ssagcn
