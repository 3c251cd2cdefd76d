#pragma once

#include "ssagcn/attention.hpp"
#include "ssagcn/graph.hpp"
#include "ssagcn/optim.hpp"
#include "ssagcn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace ssagcn {

enum class Branch { Features, GraphEmbed, KgEmbed };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Features: return "features";
    case Branch::GraphEmbed: return "graph_embed";
    case Branch::KgEmbed: return "kg_embed";
  }
  return "?";
}

struct ModelConfig {
  int hidden_dim = 32;
  int num_layers = 2;
  double dropout = 0.2;
  double learning_rate = 0.001;
  OptKind optimizer = OptKind::Adam;
  double weight_decay = 0.0;
  int max_epochs = 300;
  int patience = 30;
  std::vector<Branch> branches = {Branch::Features};
  bool use_attention = false;
  int attention_dim = 64;
  int attention_heads = 1;
  uint64_t seed = 0;

  bool has_branch(Branch b) const {
    return std::find(branches.begin(), branches.end(), b) != branches.end();
  }
};

// One propagation step sigma(A^ H W); sigma is ReLU when activate is set.
template <typename Scalar>
Tensor<Scalar> gcn_layer(std::shared_ptr<const SparseCsr<Scalar>> adj, const Tensor<Scalar>& h,
                         const Tensor<Scalar>& w, bool activate) {
  Tensor<Scalar> out = matmul(spmm(adj, h), w);
  return activate ? relu(out) : out;
}

// Frozen unsupervised inputs; only the branches the config activates need to
// be defined (privacy variants never supply features).
template <typename Scalar>
struct ModelInputs {
  Tensor<Scalar> features;
  Tensor<Scalar> graph_embed;
  Tensor<Scalar> kg_embed;
};

template <typename Scalar>
class SsaGcnModel {
 public:
  SsaGcnModel(const ModelConfig& config, std::shared_ptr<const SparseCsr<Scalar>> adj,
              const std::map<Branch, int>& input_dims, int num_classes)
      : config_(config), adj_(std::move(adj)) {
    if (config.branches.empty()) throw ValueError("model: branches must be nonempty");
    if (config.num_layers < 1) throw ValueError("model: num_layers must be >= 1");
    std::mt19937_64 rng(config.seed);
    if (config.use_attention) {
      if (!config.has_branch(Branch::GraphEmbed) || !config.has_branch(Branch::KgEmbed))
        throw ValueError("model: attention requires both embedding branches");
      attn_graph_ = CrossAttentionParams<Scalar>::init(input_dims.at(Branch::KgEmbed),
                                                       config.attention_dim,
                                                       config.attention_heads, rng);
      attn_kg_ = CrossAttentionParams<Scalar>::init(input_dims.at(Branch::GraphEmbed),
                                                    config.attention_dim,
                                                    config.attention_heads, rng);
    }
    int concat_dim = 0;
    for (Branch b : kBranchOrder) {
      if (!config.has_branch(b)) continue;
      if (!input_dims.count(b))
        throw ValueError(std::string("model: branch `") + to_string(b) + "` has no input");
      std::vector<Tensor<Scalar>> layers;
      int in_dim = input_dims.at(b);
      for (int l = 0; l < config.num_layers; ++l) {
        layers.push_back(glorot(in_dim, config.hidden_dim, rng));
        in_dim = config.hidden_dim;
      }
      encoders_[b] = std::move(layers);
      concat_dim += config.hidden_dim;
    }
    head_ = glorot(concat_dim, num_classes, rng);
  }

  Tensor<Scalar> forward(const ModelInputs<Scalar>& inputs, bool training, std::mt19937_64& rng) {
    std::vector<Tensor<Scalar>> branch_states;
    for (Branch b : kBranchOrder) {
      if (!config_.has_branch(b)) continue;
      Tensor<Scalar> h = branch_input(b, inputs);
      for (auto& w : encoders_.at(b)) {
        h = dropout(h, config_.dropout, training, rng);
        h = gcn_layer(adj_, h, w, /*activate=*/true);
      }
      branch_states.push_back(h);
    }
    return matmul(concat_cols(branch_states), head_);
  }

  std::vector<Tensor<Scalar>> parameters() {
    std::vector<Tensor<Scalar>> params;
    for (Branch b : kBranchOrder) {
      auto it = encoders_.find(b);
      if (it == encoders_.end()) continue;
      for (auto& w : it->second) params.push_back(w);
    }
    params.push_back(head_);
    attn_graph_.collect(params);
    attn_kg_.collect(params);
    return params;
  }

  std::vector<DenseMatrix<Scalar>> snapshot() {
    std::vector<DenseMatrix<Scalar>> values;
    for (auto& p : parameters()) values.push_back(p.value());
    return values;
  }

  void restore(const std::vector<DenseMatrix<Scalar>>& values) {
    auto params = parameters();
    if (values.size() != params.size()) throw ValueError("model: snapshot size mismatch");
    for (size_t i = 0; i < params.size(); ++i) params[i].value_mut() = values[i];
  }

  const ModelConfig& config() const { return config_; }

 private:
  static constexpr Branch kBranchOrder[] = {Branch::Features, Branch::GraphEmbed, Branch::KgEmbed};

  Tensor<Scalar> glorot(int rows, int cols, std::mt19937_64& rng) {
    const double bound = std::sqrt(6.0 / double(rows + cols));
    std::uniform_real_distribution<double> unif(-bound, bound);
    DenseMatrix<Scalar> w(rows, cols);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = Scalar(unif(rng));
    return Tensor<Scalar>::param(std::move(w));
  }

  Tensor<Scalar> branch_input(Branch b, const ModelInputs<Scalar>& inputs) {
    Tensor<Scalar> raw;
    switch (b) {
      case Branch::Features: raw = inputs.features; break;
      case Branch::GraphEmbed: raw = inputs.graph_embed; break;
      case Branch::KgEmbed: raw = inputs.kg_embed; break;
    }
    if (!raw.defined())
      throw ValueError(std::string("model: branch `") + to_string(b) + "` input missing");
    if (!config_.use_attention || b == Branch::Features) return raw;
    if (b == Branch::GraphEmbed)
      return multi_head_cross_attention(inputs.kg_embed, inputs.kg_embed, raw, attn_graph_);
    return multi_head_cross_attention(inputs.graph_embed, inputs.graph_embed, raw, attn_kg_);
  }

  ModelConfig config_;
  std::shared_ptr<const SparseCsr<Scalar>> adj_;
  std::map<Branch, std::vector<Tensor<Scalar>>> encoders_;
  Tensor<Scalar> head_;
  CrossAttentionParams<Scalar> attn_graph_;  // semantically enhanced graph embeddings
  CrossAttentionParams<Scalar> attn_kg_;     // structurally enhanced KG embeddings
};

// Accuracy of argmax predictions over a node set; ties go to the lowest
// class index.
template <typename Scalar>
double evaluate(const DenseMatrix<Scalar>& logits, const Eigen::VectorXi& labels,
                const std::vector<int>& nodes) {
  if (nodes.empty()) throw ValueError("evaluate: empty node set");
  int correct = 0;
  for (int i : nodes) {
    int best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = int(c);
    if (best == labels(i)) ++correct;
  }
  return double(correct) / double(nodes.size());
}

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double dev_acc = 0.0;
};

struct TrainOutcome {
  std::vector<EpochRecord> log;
  double best_dev_acc = 0.0;
  int best_epoch = -1;
};

// Full-batch training on the masked NLL objective with dev-accuracy model
// selection and patience-based early stopping. The model is left holding the
// best snapshot.
template <typename Scalar>
TrainOutcome train_model(SsaGcnModel<Scalar>& model, const ModelInputs<Scalar>& inputs,
                         const Eigen::VectorXi& labels, const SplitAssignment& split) {
  const ModelConfig& cfg = model.config();
  auto params = model.parameters();
  Optimizer<Scalar> opt(cfg.optimizer, Scalar(cfg.learning_rate), Scalar(cfg.weight_decay));
  std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL);

  TrainOutcome outcome;
  std::vector<DenseMatrix<Scalar>> best = model.snapshot();
  int epochs_without_improvement = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Tensor<Scalar> loss = nll_loss(model.forward(inputs, true, rng), labels, split.train);
    if (!std::isfinite(double(loss.item())))
      throw NumericsError("train_model: non-finite loss at epoch " + std::to_string(epoch));
    loss.backward();
    opt.step(params);

    Tensor<Scalar> eval_logits = model.forward(inputs, false, rng);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = double(loss.item());
    rec.train_acc = evaluate(eval_logits.value(), labels, split.train);
    rec.dev_acc = evaluate(eval_logits.value(), labels, split.dev);
    outcome.log.push_back(rec);

    if (rec.dev_acc > outcome.best_dev_acc || outcome.best_epoch < 0) {
      outcome.best_dev_acc = rec.dev_acc;
      outcome.best_epoch = epoch;
      best = model.snapshot();
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
    }
    if (epochs_without_improvement >= cfg.patience) break;
  }
  model.restore(best);
  return outcome;
}

}  // namespace ssagcn
