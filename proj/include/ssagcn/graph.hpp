#pragma once

#include "ssagcn/tensor.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ssagcn {

// Immutable citation graph. Directed edges are stored citing -> cited, in
// both out- and in-CSR form. Features are {0,1} bag-of-words rows.
struct Graph {
  int num_nodes = 0;
  int num_classes = 0;
  std::vector<std::pair<int, int>> edges;  // (src, dst), deduplicated, no self-loops
  std::vector<int> out_offsets, out_indices;
  std::vector<int> in_offsets, in_indices;
  Eigen::MatrixXf features;  // num_nodes x feature_dim
  Eigen::VectorXi labels;    // class index per node
  std::vector<std::string> node_ids;
  std::vector<std::string> class_names;  // index -> original label string
  int dropped_edges = 0;  // dangling or duplicate citations removed at load

  int feature_dim() const { return int(features.cols()); }
};

struct SplitAssignment {
  std::vector<int> train, dev, test;
  uint64_t seed = 0;
};

// Symmetrized adjacency with sorted unique neighbor lists (no self-loops).
struct SymAdjacency {
  std::vector<int> offsets, neighbors;

  int degree(int v) const { return offsets[v + 1] - offsets[v]; }
  const int* begin(int v) const { return neighbors.data() + offsets[v]; }
  const int* end(int v) const { return neighbors.data() + offsets[v + 1]; }
  bool adjacent(int u, int v) const;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads the tab-separated `.content` / `.cites` pair as distributed for
// Cora/CiteSeer. Nodes keep content-file order; label strings map to class
// indices in lexicographic order; edges are directed citing -> cited with
// dangling references dropped and duplicates removed.
Graph load_citation_dataset(const std::string& content_path, const std::string& cites_path);

// Builds a Graph directly from parts (tests and synthetic data).
Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges,
                 Eigen::MatrixXf features, Eigen::VectorXi labels, int num_classes);

// Seeded uniform permutation split, 80/10/10 with the remainder going to test.
SplitAssignment random_split(const Graph& graph, uint64_t seed);

void save_split(const SplitAssignment& split, const std::string& path);
SplitAssignment load_split(const std::string& path);

SymAdjacency symmetrize(const Graph& graph);

// Renormalized propagation matrix D~^{-1/2} (A_sym + I) D~^{-1/2}.
SparseCsr<double> normalized_adjacency(const Graph& graph);

}  // namespace ssagcn
