#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ssagcn/transe.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace ssagcn;

namespace {

Graph unlabeled(int n, std::vector<std::pair<int, int>> edges) {
  return make_graph(n, std::move(edges), Eigen::MatrixXf::Zero(n, 1), Eigen::VectorXi::Zero(n), 1);
}

double distance(const Eigen::RowVectorXf& h, const Eigen::RowVectorXf& r,
                const Eigen::RowVectorXf& t) {
  return double((h + r - t).norm());
}

}  // namespace

TEST_CASE("edges become single-relation triples") {
  Graph g = unlabeled(4, {{1, 2}, {0, 3}});
  TripleSet set = edges_to_triples(g);
  CHECK(set.triples.size() == g.edges.size());
  CHECK(set.num_relations == 1);
  for (auto& t : set.triples) CHECK(t.relation == 0);
  bool found = false;
  for (auto& t : set.triples) found |= (t.head == 1 && t.tail == 2);
  CHECK(found);

  TripleSet both = edges_to_triples(g, true);
  CHECK(both.triples.size() == 2 * g.edges.size());

  Graph empty = unlabeled(3, {});
  CHECK(edges_to_triples(empty).triples.empty());
}

TEST_CASE("negative sampling corrupts exactly one slot") {
  std::mt19937_64 rng(0);
  Triple t{3, 0, 7};
  int head_corruptions = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Triple c = sample_negative(t, 20, rng);
    CHECK(c.relation == 0);
    bool head_changed = c.head != t.head;
    bool tail_changed = c.tail != t.tail;
    CHECK(head_changed != tail_changed);  // exactly one
    if (head_changed) ++head_corruptions;
  }
  CHECK(double(head_corruptions) / draws == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("margin loss closed forms") {
  CHECK(margin_loss(0.0, 2.0, 1.0) == 0.0);
  CHECK(margin_loss(0.5, 0.3, 1.0) == doctest::Approx(1.2));
  CHECK(margin_loss(0.7, 0.7, 2.5) == doctest::Approx(2.5));  // d_pos = d_neg -> gamma
  // non-negative, zero iff d_neg >= d_pos + gamma
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    double dp = unif(rng), dn = unif(rng), gamma = unif(rng);
    double l = margin_loss(dp, dn, gamma);
    CHECK(l >= 0.0);
    CHECK((l == 0.0) == (dn >= dp + gamma));
  }
}

TEST_CASE("pair gradient matches central finite differences (double)") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int dim = 6;
  using Vec = Eigen::VectorXd;
  Vec h(dim), r(dim), t(dim), hn(dim), tn(dim);
  const double gamma = 1.0;

  auto loss_at = [&](const Vec& h_, const Vec& r_, const Vec& t_, const Vec& hn_, const Vec& tn_) {
    return margin_loss((h_ + r_ - t_).norm(), (hn_ + r_ - tn_).norm(), gamma);
  };
  // redraw until the hinge is active and both norms are away from zero, where
  // the loss is differentiable
  double loss0 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) {
      h(i) = unif(rng);
      r(i) = unif(rng);
      t(i) = unif(rng);
      hn(i) = unif(rng);
      tn(i) = unif(rng);
    }
    loss0 = loss_at(h, r, t, hn, tn);
  } while (loss0 < 0.1 || (h + r - t).norm() < 0.1 || (hn + r - tn).norm() < 0.1);

  Vec gh = Vec::Zero(dim), gr = Vec::Zero(dim), gt = Vec::Zero(dim), ghn = Vec::Zero(dim),
      gtn = Vec::Zero(dim);
  transe_pair_loss_grad<double>(h, r, t, hn, tn, gamma, false, gh, gr, gt, ghn, gtn);

  const double eps = 1e-6;
  auto check_grad = [&](Vec& vec, const Vec& grad) {
    for (int i = 0; i < dim; ++i) {
      double orig = vec(i);
      vec(i) = orig + eps;
      double fp = loss_at(h, r, t, hn, tn);
      vec(i) = orig - eps;
      double fm = loss_at(h, r, t, hn, tn);
      vec(i) = orig;
      double numeric = (fp - fm) / (2.0 * eps);
      double denom = std::max({std::abs(grad(i)), std::abs(numeric), 1e-3});
      CHECK(std::abs(grad(i) - numeric) / denom < 1e-5);
    }
  };
  check_grad(h, gh);
  check_grad(r, gr);
  check_grad(t, gt);
  check_grad(hn, ghn);
  check_grad(tn, gtn);
}

TEST_CASE("toy KG training orders distances and keeps unit entity norms") {
  // chain a -> b -> c plus spectators to corrupt against
  Graph g = unlabeled(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {2, 5}});
  TripleSet triples = edges_to_triples(g);

  KGEConfig cfg;
  cfg.dim = 16;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.1;
  cfg.epochs = 400;
  cfg.margin = 1.0;
  cfg.seed = 3;
  TranseLog log;
  KGEmbeddings emb = train_transe(triples, cfg, &log);

  for (int i = 0; i < 6; ++i)
    CHECK(double(emb.entities.row(i).norm()) == doctest::Approx(1.0).epsilon(1e-6));

  // d(a+r, b) < d(a+r, c)
  CHECK(distance(emb.entities.row(0), emb.relations.row(0), emb.entities.row(1)) <
        distance(emb.entities.row(0), emb.relations.row(0), emb.entities.row(2)));

  // loss trends down; the cycle cannot be embedded exactly, so some residual
  // hinge loss remains
  REQUIRE(log.epoch_loss.size() == size_t(cfg.epochs));
  auto mean_over = [&](size_t lo, size_t hi) {
    double s = 0.0;
    for (size_t e = lo; e < hi; ++e) s += log.epoch_loss[e];
    return s / double(hi - lo);
  };
  CHECK(mean_over(size_t(cfg.epochs) - 10, size_t(cfg.epochs)) < 0.8 * mean_over(0, 10));

  // ranking sanity: true tail in the top 2 for most triples, top 3 always,
  // and observed tails beat random entities on average
  int in_top2 = 0;
  double d_true_sum = 0.0, d_other_sum = 0.0;
  int other_count = 0;
  for (auto& t : triples.triples) {
    double d_true = distance(emb.entities.row(t.head), emb.relations.row(0),
                             emb.entities.row(t.tail));
    d_true_sum += d_true;
    int better = 0;
    for (int v = 0; v < 6; ++v) {
      if (v == t.tail) continue;
      double d = distance(emb.entities.row(t.head), emb.relations.row(0), emb.entities.row(v));
      d_other_sum += d;
      ++other_count;
      if (d < d_true) ++better;
    }
    CHECK(better <= 2);
    if (better <= 1) ++in_top2;
  }
  CHECK(in_top2 >= int(triples.triples.size()) - 1);
  CHECK(d_true_sum / double(triples.triples.size()) < d_other_sum / double(other_count));
}

TEST_CASE("zero epochs returns the initialization") {
  Graph g = unlabeled(4, {{0, 1}, {2, 3}});
  TripleSet triples = edges_to_triples(g);
  KGEConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 0;
  cfg.seed = 5;
  KGEmbeddings emb = train_transe(triples, cfg);

  std::mt19937_64 rng(cfg.seed);
  const float bound = float(6.0 / std::sqrt(8.0));
  std::uniform_real_distribution<float> init(-bound, bound);
  Eigen::MatrixXf expected(4, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) expected(i, j) = init(rng);
  expected.rowwise().normalize();
  CHECK(emb.entities.isApprox(expected));
}

TEST_CASE("empty triple set is an error") {
  TripleSet empty;
  empty.num_entities = 2;
  empty.num_relations = 1;
  CHECK_THROWS_AS(train_transe(empty, KGEConfig{}), ValueError);
}
