#pragma once

#include "ssagcn/graph.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace ssagcn {

struct WalkConfig {
  double p = 0.25;  // return parameter
  double q = 0.25;  // in-out parameter
  int walk_length = 80;
  int walks_per_node = 10;
  int window = 10;
  int dim = 128;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  int negatives_per_positive = 5;
  int epochs = 5;
  uint64_t seed = 0;
};

struct NodeEmbeddings {
  Eigen::MatrixXf input;    // exported structural embeddings
  Eigen::MatrixXf context;  // output vectors of the Skip-gram objective
};

// Normalized second-order transition distribution over the neighbors of
// `curr`, given the previous walk node (or -1 for the first step, which is
// uniform). Weight 1/p back to prev, 1 to common neighbors of prev, 1/q
// otherwise. Empty when curr has no neighbors.
std::vector<double> transition_weights(const SymAdjacency& adj, int prev, int curr,
                                       const WalkConfig& config);

// walks_per_node biased walks of walk_length from every node; start order is
// reshuffled for each pass over the node set.
std::vector<std::vector<int>> generate_walks(const SymAdjacency& adj, int num_nodes,
                                             const WalkConfig& config, std::mt19937_64& rng);

// Skip-gram with negative sampling over the walk corpus (unigram^0.75
// negative distribution, linear learning-rate decay).
NodeEmbeddings skipgram_train(const std::vector<std::vector<int>>& walks, int num_nodes,
                              const WalkConfig& config, std::mt19937_64& rng);

NodeEmbeddings train_node2vec(const Graph& graph, const WalkConfig& config);

}  // namespace ssagcn
