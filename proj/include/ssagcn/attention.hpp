#pragma once

#include "ssagcn/tensor.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace ssagcn {

// Per-direction query/key projections for cross-attention. One (wq, wk) pair
// per head; all heads share the value matrix and their outputs are averaged,
// so the output width always equals the value width.
template <typename Scalar>
struct CrossAttentionParams {
  std::vector<Tensor<Scalar>> wq, wk;  // in_dim x d_a, one per head
  int d_a = 64;

  static CrossAttentionParams init(int in_dim, int d_a, int num_heads, std::mt19937_64& rng) {
    if (num_heads < 1) throw ValueError("cross-attention: num_heads must be >= 1");
    CrossAttentionParams params;
    params.d_a = d_a;
    const double bound = std::sqrt(6.0 / double(in_dim + d_a));
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (int h = 0; h < num_heads; ++h) {
      DenseMatrix<Scalar> q(in_dim, d_a), k(in_dim, d_a);
      for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = Scalar(unif(rng));
      for (Eigen::Index i = 0; i < k.rows(); ++i)
        for (Eigen::Index j = 0; j < k.cols(); ++j) k(i, j) = Scalar(unif(rng));
      params.wq.push_back(Tensor<Scalar>::param(std::move(q)));
      params.wk.push_back(Tensor<Scalar>::param(std::move(k)));
    }
    return params;
  }

  void collect(std::vector<Tensor<Scalar>>& out) {
    for (auto& t : wq) out.push_back(t);
    for (auto& t : wk) out.push_back(t);
  }
};

// softmax((Q K^T)/sqrt(d_a)) V with Q = queries_src * wq, K = keys_src * wk.
// Attention is global over all N rows; gradients flow into wq/wk (and the
// operands, if they require grad).
template <typename Scalar>
Tensor<Scalar> cross_attention(const Tensor<Scalar>& queries_src, const Tensor<Scalar>& keys_src,
                               const Tensor<Scalar>& values, const Tensor<Scalar>& wq,
                               const Tensor<Scalar>& wk) {
  if (queries_src.rows() != keys_src.rows() || keys_src.rows() != values.rows())
    throw ShapeError("cross_attention: inputs must share the node dimension");
  Tensor<Scalar> q = matmul(queries_src, wq);
  Tensor<Scalar> k = matmul(keys_src, wk);
  const Scalar inv_sqrt_da = Scalar(1.0 / std::sqrt(double(wq.cols())));
  Tensor<Scalar> scores = scale(matmul(q, transpose(k)), inv_sqrt_da);
  return matmul(softmax_rows(scores), values);
}

// Head outputs are averaged; a single head reduces exactly to cross_attention.
template <typename Scalar>
Tensor<Scalar> multi_head_cross_attention(const Tensor<Scalar>& queries_src,
                                          const Tensor<Scalar>& keys_src,
                                          const Tensor<Scalar>& values,
                                          const CrossAttentionParams<Scalar>& params) {
  const size_t heads = params.wq.size();
  if (heads == 0) throw ValueError("cross-attention: no heads");
  Tensor<Scalar> out = cross_attention(queries_src, keys_src, values, params.wq[0], params.wk[0]);
  for (size_t h = 1; h < heads; ++h)
    out = add(out, cross_attention(queries_src, keys_src, values, params.wq[h], params.wk[h]));
  if (heads > 1) out = scale(out, Scalar(1) / Scalar(heads));
  return out;
}

}  // namespace ssagcn
