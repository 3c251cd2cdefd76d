#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ssagcn/attention.hpp"

#include <cmath>
#include <random>

using namespace ssagcn;

namespace {

DenseMatrix<double> random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  DenseMatrix<double> m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = unif(rng);
  return m;
}

}  // namespace

TEST_CASE("single row attends to itself") {
  std::mt19937_64 rng(0);
  auto params = CrossAttentionParams<double>::init(3, 4, 1, rng);
  DenseMatrix<double> src = random_matrix(1, 3, rng);
  DenseMatrix<double> value = random_matrix(1, 5, rng);
  auto out = cross_attention(Tensor<double>::constant(src), Tensor<double>::constant(src),
                             Tensor<double>::constant(value), params.wq[0], params.wk[0]);
  CHECK(out.value().isApprox(value, 1e-12));

  auto multi_params = CrossAttentionParams<double>::init(3, 4, 5, rng);
  auto multi = multi_head_cross_attention(Tensor<double>::constant(src),
                                          Tensor<double>::constant(src),
                                          Tensor<double>::constant(value), multi_params);
  CHECK(multi.value().isApprox(value, 1e-12));
}

TEST_CASE("identical key/query rows average the values") {
  std::mt19937_64 rng(1);
  auto params = CrossAttentionParams<double>::init(3, 4, 1, rng);
  DenseMatrix<double> src(2, 3);
  src << 1, -2, 0.5, 1, -2, 0.5;
  DenseMatrix<double> value(2, 2);
  value << 1, 2, 3, 4;
  auto out = cross_attention(Tensor<double>::constant(src), Tensor<double>::constant(src),
                             Tensor<double>::constant(value), params.wq[0], params.wk[0]);
  CHECK(out.value()(0, 0) == doctest::Approx(2.0));
  CHECK(out.value()(0, 1) == doctest::Approx(3.0));
  CHECK(out.value().row(0).isApprox(out.value().row(1), 1e-12));
}

TEST_CASE("hand-set projections give the expected softmax weights") {
  // wq = wk = I on 2-d inputs with orthogonal rows e1*a, e2*a; scores become
  // [[2,0],[0,2]] after the 1/sqrt(d_a) division when a^2/sqrt(2) = 2.
  const double a = std::sqrt(2.0 * std::sqrt(2.0));
  DenseMatrix<double> src(2, 2);
  src << a, 0, 0, a;
  DenseMatrix<double> eye = DenseMatrix<double>::Identity(2, 2);
  DenseMatrix<double> value(2, 2);
  value << 1, 0, 0, 1;
  auto out = cross_attention(Tensor<double>::constant(src), Tensor<double>::constant(src),
                             Tensor<double>::constant(value), Tensor<double>::param(eye),
                             Tensor<double>::param(eye));
  const double e2 = std::exp(2.0);
  const double w_self = e2 / (e2 + 1.0);
  CHECK(out.value()(0, 0) == doctest::Approx(w_self).epsilon(1e-9));
  CHECK(out.value()(0, 1) == doctest::Approx(1.0 - w_self).epsilon(1e-9));
  CHECK(out.value()(1, 1) == doctest::Approx(w_self).epsilon(1e-9));
}

TEST_CASE("one head reduces to plain cross attention bitwise") {
  std::mt19937_64 rng(2);
  auto params = CrossAttentionParams<double>::init(4, 3, 1, rng);
  DenseMatrix<double> q_src = random_matrix(5, 4, rng);
  DenseMatrix<double> value = random_matrix(5, 6, rng);
  Tensor<double> qs = Tensor<double>::constant(q_src);
  Tensor<double> v = Tensor<double>::constant(value);
  auto single = cross_attention(qs, qs, v, params.wq[0], params.wk[0]);
  auto multi = multi_head_cross_attention(qs, qs, v, params);
  CHECK(single.value() == multi.value());
}

TEST_CASE("identical heads average to the single-head output") {
  std::mt19937_64 rng(3);
  auto one = CrossAttentionParams<double>::init(4, 3, 1, rng);
  CrossAttentionParams<double> three;
  three.d_a = one.d_a;
  for (int h = 0; h < 3; ++h) {
    three.wq.push_back(Tensor<double>::param(one.wq[0].value()));
    three.wk.push_back(Tensor<double>::param(one.wk[0].value()));
  }
  DenseMatrix<double> q_src = random_matrix(5, 4, rng);
  DenseMatrix<double> value = random_matrix(5, 6, rng);
  Tensor<double> qs = Tensor<double>::constant(q_src);
  Tensor<double> v = Tensor<double>::constant(value);
  auto a = multi_head_cross_attention(qs, qs, v, one);
  auto b = multi_head_cross_attention(qs, qs, v, three);
  CHECK(a.value().isApprox(b.value(), 1e-12));
}

TEST_CASE("attention rows are probability distributions") {
  std::mt19937_64 rng(4);
  DenseMatrix<double> q_src = random_matrix(7, 4, rng);
  DenseMatrix<double> wq = random_matrix(4, 3, rng);
  DenseMatrix<double> wk = random_matrix(4, 3, rng);
  Tensor<double> q = matmul(Tensor<double>::constant(q_src), Tensor<double>::constant(wq));
  Tensor<double> k = matmul(Tensor<double>::constant(q_src), Tensor<double>::constant(wk));
  auto weights = softmax_rows(scale(matmul(q, transpose(k)), 1.0 / std::sqrt(3.0)));
  for (Eigen::Index i = 0; i < 7; ++i) {
    CHECK(weights.value().row(i).sum() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(weights.value().row(i).minCoeff() >= 0.0);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(5);
  auto params = CrossAttentionParams<double>::init(4, 3, 2, rng);
  DenseMatrix<double> q_src = random_matrix(6, 4, rng);
  DenseMatrix<double> value = random_matrix(6, 5, rng);

  std::vector<int> perm{3, 0, 5, 1, 4, 2};
  DenseMatrix<double> q_perm(6, 4), v_perm(6, 5);
  for (int i = 0; i < 6; ++i) {
    q_perm.row(i) = q_src.row(perm[size_t(i)]);
    v_perm.row(i) = value.row(perm[size_t(i)]);
  }
  auto base = multi_head_cross_attention(Tensor<double>::constant(q_src),
                                         Tensor<double>::constant(q_src),
                                         Tensor<double>::constant(value), params);
  auto permuted = multi_head_cross_attention(Tensor<double>::constant(q_perm),
                                             Tensor<double>::constant(q_perm),
                                             Tensor<double>::constant(v_perm), params);
  for (int i = 0; i < 6; ++i)
    CHECK(permuted.value().row(i).isApprox(base.value().row(perm[size_t(i)]), 1e-9));
}

TEST_CASE("value-scale linearity") {
  std::mt19937_64 rng(6);
  auto params = CrossAttentionParams<double>::init(4, 3, 1, rng);
  DenseMatrix<double> q_src = random_matrix(5, 4, rng);
  DenseMatrix<double> value = random_matrix(5, 6, rng);
  Tensor<double> qs = Tensor<double>::constant(q_src);
  auto base = cross_attention(qs, qs, Tensor<double>::constant(value), params.wq[0], params.wk[0]);
  auto scaled = cross_attention(qs, qs, Tensor<double>::constant(DenseMatrix<double>(3.0 * value)),
                                params.wq[0], params.wk[0]);
  CHECK(scaled.value().isApprox(3.0 * base.value(), 1e-12));
}

TEST_CASE("gradients flow into the projections") {
  std::mt19937_64 rng(7);
  DenseMatrix<double> q_src = random_matrix(6, 4, rng);
  DenseMatrix<double> value = random_matrix(6, 5, rng);
  DenseMatrix<double> wk = random_matrix(4, 3, rng);

  std::function<Tensor<double>(const Tensor<double>&)> wrt_wq = [&](const Tensor<double>& wq) {
    return sum(square(cross_attention(Tensor<double>::constant(q_src),
                                      Tensor<double>::constant(q_src),
                                      Tensor<double>::constant(value), wq,
                                      Tensor<double>::constant(wk))));
  };
  CHECK(grad_check<double>(wrt_wq, random_matrix(4, 3, rng), 1e-5) < 1e-4);

  DenseMatrix<double> wq = random_matrix(4, 3, rng);
  std::function<Tensor<double>(const Tensor<double>&)> wrt_wk = [&](const Tensor<double>& w) {
    return sum(square(cross_attention(Tensor<double>::constant(q_src),
                                      Tensor<double>::constant(q_src),
                                      Tensor<double>::constant(value),
                                      Tensor<double>::constant(wq), w)));
  };
  CHECK(grad_check<double>(wrt_wk, random_matrix(4, 3, rng), 1e-5) < 1e-4);
}

TEST_CASE("mismatched row counts are an error") {
  std::mt19937_64 rng(8);
  auto params = CrossAttentionParams<double>::init(3, 2, 1, rng);
  CHECK_THROWS_AS(cross_attention(Tensor<double>::constant(random_matrix(4, 3, rng)),
                                  Tensor<double>::constant(random_matrix(4, 3, rng)),
                                  Tensor<double>::constant(random_matrix(5, 2, rng)),
                                  params.wq[0], params.wk[0]),
                  ShapeError);
}
