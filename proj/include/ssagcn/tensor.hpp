#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ssagcn {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// CSR storage: row offsets / sorted column indices / values.
template <typename Scalar>
using SparseCsr = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
bool all_finite(const DenseMatrix<Scalar>& m) {
  return m.allFinite();
}

// Dense 2-D value participating in a define-by-run computation graph.
// Ops record a backprop closure; backward() replays them in reverse
// topological order and accumulates into .grad of every requires_grad
// ancestor.
template <typename Scalar>
class Tensor {
 public:
  struct Node {
    DenseMatrix<Scalar> value;
    DenseMatrix<Scalar> grad;  // empty until backward touches it
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;

    void accumulate(const DenseMatrix<Scalar>& g) {
      if (grad.size() == 0) grad = DenseMatrix<Scalar>::Zero(value.rows(), value.cols());
      grad += g;
    }
  };

  Tensor() = default;
  explicit Tensor(DenseMatrix<Scalar> value, bool requires_grad = false)
      : node_(std::make_shared<Node>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }

  static Tensor constant(DenseMatrix<Scalar> v) { return Tensor(std::move(v), false); }
  static Tensor param(DenseMatrix<Scalar> v) { return Tensor(std::move(v), true); }

  bool defined() const { return node_ != nullptr; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  const DenseMatrix<Scalar>& value() const { return node_->value; }
  DenseMatrix<Scalar>& value_mut() { return node_->value; }
  const DenseMatrix<Scalar>& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad.size() != 0; }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad() { node_->grad.resize(0, 0); }
  Scalar item() const {
    if (rows() != 1 || cols() != 1) throw ShapeError("item() requires a 1x1 tensor");
    return node_->value(0, 0);
  }
  std::shared_ptr<Node> node() const { return node_; }

  // Detached copy of the current value (no graph history).
  Tensor detach() const { return Tensor(node_->value, false); }

  void backward() const {
    if (rows() != 1 || cols() != 1) throw ShapeError("backward() requires a scalar loss");
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    topo(node_.get(), seen, order);
    node_->grad = DenseMatrix<Scalar>::Constant(1, 1, Scalar(1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* n = *it;
      if (n->backprop && n->grad.size() != 0) n->backprop(*n);
    }
  }

 private:
  static void topo(Node* n, std::unordered_set<Node*>& seen, std::vector<Node*>& order) {
    if (!n || seen.count(n)) return;
    seen.insert(n);
    for (auto& p : n->parents) topo(p.get(), seen, order);
    order.push_back(n);
  }

  std::shared_ptr<Node> node_;
};

namespace detail {

template <typename Scalar>
Tensor<Scalar> make_result(DenseMatrix<Scalar> value,
                           std::vector<std::shared_ptr<typename Tensor<Scalar>::Node>> parents,
                           std::function<void(typename Tensor<Scalar>::Node&)> backprop) {
  bool needs = false;
  for (auto& p : parents)
    if (p->requires_grad) needs = true;
  Tensor<Scalar> out(std::move(value), needs);
  if (needs) {
    out.node()->parents = std::move(parents);
    out.node()->backprop = std::move(backprop);
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions disagree (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  auto an = a.node();
  auto bn = b.node();
  return detail::make_result<Scalar>(
      an->value * bn->value, {an, bn}, [an, bn](typename Tensor<Scalar>::Node& out) {
        if (an->requires_grad) an->accumulate(out.grad * bn->value.transpose());
        if (bn->requires_grad) bn->accumulate(an->value.transpose() * out.grad);
      });
}

// Sparse-dense product; gradient flows into the dense operand only.
template <typename Scalar>
Tensor<Scalar> spmm(std::shared_ptr<const SparseCsr<Scalar>> s, const Tensor<Scalar>& d) {
  if (s->cols() != d.rows())
    throw ShapeError("spmm: inner dimensions disagree (" + std::to_string(s->cols()) + " vs " +
                     std::to_string(d.rows()) + ")");
  auto dn = d.node();
  return detail::make_result<Scalar>(
      DenseMatrix<Scalar>(*s * dn->value), {dn}, [s, dn](typename Tensor<Scalar>::Node& out) {
        if (dn->requires_grad) dn->accumulate(s->transpose() * out.grad);
      });
}

template <typename Scalar>
Tensor<Scalar> spmm(const SparseCsr<Scalar>& s, const Tensor<Scalar>& d) {
  return spmm(std::make_shared<const SparseCsr<Scalar>>(s), d);
}

template <typename Scalar>
Tensor<Scalar> transpose(const Tensor<Scalar>& a) {
  auto an = a.node();
  return detail::make_result<Scalar>(an->value.transpose(), {an},
                                     [an](typename Tensor<Scalar>::Node& out) {
                                       an->accumulate(out.grad.transpose());
                                     });
}

template <typename Scalar>
Tensor<Scalar> add(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("add: shape mismatch");
  auto an = a.node();
  auto bn = b.node();
  return detail::make_result<Scalar>(an->value + bn->value, {an, bn},
                                     [an, bn](typename Tensor<Scalar>::Node& out) {
                                       if (an->requires_grad) an->accumulate(out.grad);
                                       if (bn->requires_grad) bn->accumulate(out.grad);
                                     });
}

template <typename Scalar>
Tensor<Scalar> scale(const Tensor<Scalar>& a, Scalar c) {
  auto an = a.node();
  return detail::make_result<Scalar>(DenseMatrix<Scalar>(an->value * c), {an},
                                     [an, c](typename Tensor<Scalar>::Node& out) {
                                       an->accumulate(out.grad * c);
                                     });
}

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& a) {
  auto an = a.node();
  DenseMatrix<Scalar> v = an->value.cwiseMax(Scalar(0));
  return detail::make_result<Scalar>(std::move(v), {an},
                                     [an](typename Tensor<Scalar>::Node& out) {
                                       DenseMatrix<Scalar> mask =
                                           (an->value.array() > Scalar(0)).template cast<Scalar>();
                                       an->accumulate(out.grad.cwiseProduct(mask));
                                     });
}

// Inverted dropout: zeroes entries with probability `rate` and rescales
// survivors by 1/(1-rate) in training mode; identity in eval mode.
template <typename Scalar>
Tensor<Scalar> dropout(const Tensor<Scalar>& a, double rate, bool training, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ValueError("dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return a;
  auto an = a.node();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DenseMatrix<Scalar> mask(a.rows(), a.cols());
  const Scalar keep_scale = Scalar(1.0 / (1.0 - rate));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      mask(i, j) = unif(rng) < rate ? Scalar(0) : keep_scale;
  return detail::make_result<Scalar>(an->value.cwiseProduct(mask), {an},
                                     [an, mask](typename Tensor<Scalar>::Node& out) {
                                       an->accumulate(out.grad.cwiseProduct(mask));
                                     });
}

template <typename Scalar>
Tensor<Scalar> softmax_rows(const Tensor<Scalar>& a) {
  auto an = a.node();
  DenseMatrix<Scalar> y(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Scalar m = an->value.row(i).maxCoeff();
    Eigen::Array<Scalar, 1, Eigen::Dynamic> e = (an->value.row(i).array() - m).exp();
    y.row(i) = e / e.sum();
  }
  return detail::make_result<Scalar>(y, {an}, [an, y](typename Tensor<Scalar>::Node& out) {
    // dX_i = (dY_i - <dY_i, Y_i>) * Y_i, rowwise
    DenseMatrix<Scalar> dx(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      Scalar dot = out.grad.row(i).dot(y.row(i));
      dx.row(i) = (out.grad.row(i).array() - dot) * y.row(i).array();
    }
    an->accumulate(dx);
  });
}

template <typename Scalar>
Tensor<Scalar> concat_cols(const std::vector<Tensor<Scalar>>& xs) {
  if (xs.empty()) throw ShapeError("concat_cols: empty operand list");
  Eigen::Index rows = xs.front().rows();
  Eigen::Index cols = 0;
  for (auto& x : xs) {
    if (x.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += x.cols();
  }
  DenseMatrix<Scalar> v(rows, cols);
  std::vector<std::shared_ptr<typename Tensor<Scalar>::Node>> parents;
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (auto& x : xs) {
    v.middleCols(off, x.cols()) = x.value();
    parents.push_back(x.node());
    offsets.push_back(off);
    off += x.cols();
  }
  auto parents_copy = parents;
  return detail::make_result<Scalar>(
      std::move(v), std::move(parents),
      [parents_copy, offsets](typename Tensor<Scalar>::Node& out) {
        for (size_t k = 0; k < parents_copy.size(); ++k) {
          auto& p = parents_copy[k];
          if (p->requires_grad)
            p->accumulate(out.grad.middleCols(offsets[k], p->value.cols()));
        }
      });
}

// Mean negative log-likelihood over the masked rows; rows are logits (or
// log-probabilities) and go through a stable log-sum-exp.
template <typename Scalar>
Tensor<Scalar> nll_loss(const Tensor<Scalar>& logits, const Eigen::VectorXi& labels,
                        const std::vector<int>& mask) {
  if (mask.empty()) throw ValueError("nll_loss: empty mask");
  if (labels.size() != logits.rows()) throw ShapeError("nll_loss: labels/logits row mismatch");
  auto ln = logits.node();
  const auto& x = ln->value;
  for (int i : mask) {
    if (i < 0 || i >= x.rows()) throw ValueError("nll_loss: mask index out of range");
    if (labels(i) < 0 || labels(i) >= x.cols()) throw ValueError("nll_loss: label out of range");
  }
  double total = 0.0;
  for (int i : mask) {
    Scalar m = x.row(i).maxCoeff();
    double lse = double(m) + std::log(double((x.row(i).array() - m).exp().sum()));
    total += lse - double(x(i, labels(i)));
  }
  DenseMatrix<Scalar> v(1, 1);
  v(0, 0) = Scalar(total / double(mask.size()));
  Eigen::VectorXi labels_copy = labels;
  std::vector<int> mask_copy = mask;
  return detail::make_result<Scalar>(
      std::move(v), {ln}, [ln, labels_copy, mask_copy](typename Tensor<Scalar>::Node& out) {
        const auto& x = ln->value;
        DenseMatrix<Scalar> dx = DenseMatrix<Scalar>::Zero(x.rows(), x.cols());
        const Scalar inv = Scalar(1) / Scalar(mask_copy.size());
        for (int i : mask_copy) {
          Scalar m = x.row(i).maxCoeff();
          Eigen::Array<Scalar, 1, Eigen::Dynamic> e = (x.row(i).array() - m).exp();
          dx.row(i) = (e / e.sum()) * inv;
          dx(i, labels_copy(i)) -= inv;
        }
        ln->accumulate(out.grad(0, 0) * dx);
      });
}

template <typename Scalar>
Tensor<Scalar> sum(const Tensor<Scalar>& a) {
  auto an = a.node();
  DenseMatrix<Scalar> v(1, 1);
  v(0, 0) = an->value.sum();
  return detail::make_result<Scalar>(std::move(v), {an},
                                     [an](typename Tensor<Scalar>::Node& out) {
                                       an->accumulate(DenseMatrix<Scalar>::Constant(
                                           an->value.rows(), an->value.cols(), out.grad(0, 0)));
                                     });
}

template <typename Scalar>
Tensor<Scalar> square(const Tensor<Scalar>& a) {
  auto an = a.node();
  return detail::make_result<Scalar>(
      DenseMatrix<Scalar>(an->value.cwiseProduct(an->value)), {an},
      [an](typename Tensor<Scalar>::Node& out) {
        an->accumulate(Scalar(2) * out.grad.cwiseProduct(an->value));
      });
}

// Central finite differences against the analytic gradient of a scalar-valued
// function of one tensor. Returns the max relative error over entries.
template <typename Scalar>
double grad_check(const std::function<Tensor<Scalar>(const Tensor<Scalar>&)>& fn,
                  const DenseMatrix<Scalar>& point, double epsilon) {
  Tensor<Scalar> x = Tensor<Scalar>::param(point);
  Tensor<Scalar> loss = fn(x);
  loss.backward();
  DenseMatrix<Scalar> analytic = x.grad();
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < point.rows(); ++i) {
    for (Eigen::Index j = 0; j < point.cols(); ++j) {
      DenseMatrix<Scalar> plus = point, minus = point;
      plus(i, j) += Scalar(epsilon);
      minus(i, j) -= Scalar(epsilon);
      double fp = double(fn(Tensor<Scalar>::constant(plus)).item());
      double fm = double(fn(Tensor<Scalar>::constant(minus)).item());
      double numeric = (fp - fm) / (2.0 * epsilon);
      double a = double(analytic(i, j));
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-2});
      max_err = std::max(max_err, std::abs(a - numeric) / denom);
    }
  }
  return max_err;
}

}  // namespace ssagcn
