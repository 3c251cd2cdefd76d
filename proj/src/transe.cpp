#include "ssagcn/transe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssagcn {

TripleSet edges_to_triples(const Graph& graph, bool both_directions) {
  TripleSet set;
  set.num_entities = graph.num_nodes;
  set.num_relations = 1;
  set.triples.reserve(graph.edges.size() * (both_directions ? 2 : 1));
  for (auto& [citing, cited] : graph.edges) {
    set.triples.push_back({citing, 0, cited});
    if (both_directions) set.triples.push_back({cited, 0, citing});
  }
  return set;
}

Triple sample_negative(const Triple& triple, int num_entities, std::mt19937_64& rng) {
  if (num_entities < 2) throw ValueError("sample_negative: need at least 2 entities");
  std::uniform_int_distribution<int> pick(0, num_entities - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Triple corrupted = triple;
  if (coin(rng) < 0.5) {
    do {
      corrupted.head = pick(rng);
    } while (corrupted.head == triple.head);
  } else {
    do {
      corrupted.tail = pick(rng);
    } while (corrupted.tail == triple.tail);
  }
  return corrupted;
}

double margin_loss(double positive_distance, double negative_distance, double gamma) {
  return std::max(0.0, gamma + positive_distance - negative_distance);
}

KGEmbeddings train_transe(const TripleSet& triples, const KGEConfig& config, TranseLog* log) {
  if (triples.triples.empty()) throw ValueError("train_transe: empty triple set");
  const int dim = config.dim;
  const int ne = triples.num_entities;
  const int nr = triples.num_relations;
  std::mt19937_64 rng(config.seed);

  KGEmbeddings emb;
  emb.entities.resize(ne, dim);
  emb.relations.resize(nr, dim);
  const float bound = float(6.0 / std::sqrt(double(dim)));
  std::uniform_real_distribution<float> init(-bound, bound);
  for (int i = 0; i < ne; ++i)
    for (int j = 0; j < dim; ++j) emb.entities(i, j) = init(rng);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < dim; ++j) emb.relations(i, j) = init(rng);
  emb.entities.rowwise().normalize();
  emb.relations.rowwise().normalize();

  Eigen::MatrixXf ent_grad = Eigen::MatrixXf::Zero(ne, dim);
  Eigen::MatrixXf rel_grad = Eigen::MatrixXf::Zero(nr, dim);
  Eigen::MatrixXf ent_acc = Eigen::MatrixXf::Zero(ne, dim);
  Eigen::MatrixXf rel_acc = Eigen::MatrixXf::Zero(nr, dim);
  const float eps = 1e-10f;
  const float lr = float(config.learning_rate);

  std::vector<size_t> order(triples.triples.size());
  std::iota(order.begin(), order.end(), size_t(0));
  Eigen::VectorXf gh(dim), gr(dim), gt(dim), ghn(dim), gtn(dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += size_t(config.batch_size)) {
      const size_t stop = std::min(order.size(), start + size_t(config.batch_size));
      ent_grad.setZero();
      rel_grad.setZero();
      for (size_t k = start; k < stop; ++k) {
        const Triple& pos = triples.triples[order[k]];
        const Triple neg = sample_negative(pos, ne, rng);
        gh.setZero(); gr.setZero(); gt.setZero(); ghn.setZero(); gtn.setZero();
        Eigen::VectorXf h = emb.entities.row(pos.head);
        Eigen::VectorXf r = emb.relations.row(pos.relation);
        Eigen::VectorXf t = emb.entities.row(pos.tail);
        Eigen::VectorXf hn = emb.entities.row(neg.head);
        Eigen::VectorXf tn = emb.entities.row(neg.tail);
        float loss = transe_pair_loss_grad<float>(h, r, t, hn, tn, float(config.margin),
                                                  config.l1_distance, gh, gr, gt, ghn, gtn);
        epoch_loss += double(loss);
        if (loss > 0.0f) {
          ent_grad.row(pos.head) += gh.transpose();
          rel_grad.row(pos.relation) += gr.transpose();
          ent_grad.row(pos.tail) += gt.transpose();
          ent_grad.row(neg.head) += ghn.transpose();
          ent_grad.row(neg.tail) += gtn.transpose();
        }
      }
      ent_acc += ent_grad.cwiseProduct(ent_grad);
      rel_acc += rel_grad.cwiseProduct(rel_grad);
      emb.entities.array() -= lr * ent_grad.array() / (ent_acc.array().sqrt() + eps);
      emb.relations.array() -= lr * rel_grad.array() / (rel_acc.array().sqrt() + eps);
      emb.entities.rowwise().normalize();
      if (!emb.entities.allFinite() || !emb.relations.allFinite())
        throw NumericsError("train_transe: non-finite embedding at epoch " +
                            std::to_string(epoch));
    }
    if (log) log->epoch_loss.push_back(epoch_loss / double(order.size()));
  }
  return emb;
}

}  // namespace ssagcn
