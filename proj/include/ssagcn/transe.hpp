#pragma once

#include "ssagcn/graph.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace ssagcn {

struct Triple {
  int head = 0;
  int relation = 0;
  int tail = 0;
};

struct TripleSet {
  std::vector<Triple> triples;
  int num_entities = 0;
  int num_relations = 0;
};

struct KGEConfig {
  int dim = 200;
  int batch_size = 2000;
  double learning_rate = 1.0;
  int epochs = 2000;
  double margin = 1.0;
  bool l1_distance = false;
  bool both_directions = false;  // also emit the reversed triple per edge
  uint64_t seed = 0;
};

struct KGEmbeddings {
  Eigen::MatrixXf entities;   // unit-L2 rows
  Eigen::MatrixXf relations;  // not re-normalized
};

struct TranseLog {
  std::vector<double> epoch_loss;
};

// One (citing, cites, cited) triple per directed edge, single relation 0.
TripleSet edges_to_triples(const Graph& graph, bool both_directions = false);

// Corrupts exactly one of head/tail (never both) with a uniform random
// entity distinct from the original; the relation is kept.
Triple sample_negative(const Triple& triple, int num_entities, std::mt19937_64& rng);

// Hinge ranking loss max(0, gamma + d_pos - d_neg).
double margin_loss(double positive_distance, double negative_distance, double gamma);

// Loss and gradients of one hinge term for an L2-distance TransE pair; usable
// at double precision for finite-difference checks. Gradient vectors are
// accumulated into (+=) and must be pre-sized and zeroed by the caller.
template <typename Scalar>
Scalar transe_pair_loss_grad(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& h,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& t,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& hn,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& tn, Scalar gamma, bool l1,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gh, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gr,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gt, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& ghn,
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gtn) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vec dp = h + r - t;
  Vec dn = hn + r - tn;
  Scalar pos, neg;
  Vec dpos_dvec, dneg_dvec;
  if (l1) {
    pos = dp.template lpNorm<1>();
    neg = dn.template lpNorm<1>();
    dpos_dvec = dp.array().sign().matrix();
    dneg_dvec = dn.array().sign().matrix();
  } else {
    pos = dp.norm();
    neg = dn.norm();
    dpos_dvec = pos > Scalar(0) ? Vec(dp / pos) : Vec(Vec::Zero(dp.size()));
    dneg_dvec = neg > Scalar(0) ? Vec(dn / neg) : Vec(Vec::Zero(dn.size()));
  }
  Scalar loss = gamma + pos - neg;
  if (loss <= Scalar(0)) return Scalar(0);
  gh += dpos_dvec;
  gr += dpos_dvec - dneg_dvec;
  gt -= dpos_dvec;
  ghn -= dneg_dvec;
  gtn += dneg_dvec;
  return loss;
}

// Minibatch Adagrad on the margin ranking loss, one sampled negative per
// positive per step; entity rows re-normalized to unit L2 after every step.
KGEmbeddings train_transe(const TripleSet& triples, const KGEConfig& config,
                          TranseLog* log = nullptr);

}  // namespace ssagcn
