#include "ssagcn/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ssagcn {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  return fields;
}

void build_csr(int num_nodes, const std::vector<std::pair<int, int>>& edges, bool by_src,
               std::vector<int>& offsets, std::vector<int>& indices) {
  offsets.assign(num_nodes + 1, 0);
  for (auto& [s, d] : edges) ++offsets[(by_src ? s : d) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  indices.resize(edges.size());
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (auto& [s, d] : edges) {
    int key = by_src ? s : d;
    indices[cursor[key]++] = by_src ? d : s;
  }
  for (int v = 0; v < num_nodes; ++v)
    std::sort(indices.begin() + offsets[v], indices.begin() + offsets[v + 1]);
}

void finalize(Graph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  build_csr(g.num_nodes, g.edges, true, g.out_offsets, g.out_indices);
  build_csr(g.num_nodes, g.edges, false, g.in_offsets, g.in_indices);
}

}  // namespace

bool SymAdjacency::adjacent(int u, int v) const {
  return std::binary_search(begin(u), end(u), v);
}

Graph load_citation_dataset(const std::string& content_path, const std::string& cites_path) {
  std::ifstream content(content_path);
  if (!content) throw ParseError("cannot open content file: " + content_path);
  std::ifstream cites(cites_path);
  if (!cites) throw ParseError("cannot open cites file: " + cites_path);

  std::vector<std::string> ids;
  std::vector<std::string> label_strings;
  std::vector<std::vector<float>> feature_rows;
  std::unordered_map<std::string, int> id_to_index;

  std::string line;
  int line_no = 0;
  size_t feature_dim = 0;
  while (std::getline(content, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() < 3)
      throw ParseError(content_path + ":" + std::to_string(line_no) +
                       ": expected `id <TAB> features... <TAB> label`");
    size_t dim = fields.size() - 2;
    if (feature_dim == 0)
      feature_dim = dim;
    else if (dim != feature_dim)
      throw ParseError(content_path + ":" + std::to_string(line_no) +
                       ": inconsistent feature count");
    std::vector<float> row(dim);
    for (size_t j = 0; j < dim; ++j) {
      const std::string& f = fields[j + 1];
      if (f == "0")
        row[j] = 0.0f;
      else if (f == "1")
        row[j] = 1.0f;
      else
        throw ParseError(content_path + ":" + std::to_string(line_no) +
                         ": feature value not in {0,1}: `" + f + "`");
    }
    if (id_to_index.count(fields.front()))
      throw ParseError(content_path + ":" + std::to_string(line_no) + ": duplicate node id `" +
                       fields.front() + "`");
    id_to_index[fields.front()] = int(ids.size());
    ids.push_back(fields.front());
    label_strings.push_back(fields.back());
    feature_rows.push_back(std::move(row));
  }
  if (ids.empty()) throw ParseError(content_path + ": empty content file");

  // lexicographic label -> class index mapping for cross-run determinism
  std::map<std::string, int> class_index;
  for (auto& s : label_strings) class_index.emplace(s, 0);
  int next = 0;
  for (auto& [name, idx] : class_index) idx = next++;

  Graph g;
  g.num_nodes = int(ids.size());
  g.num_classes = next;
  g.node_ids = std::move(ids);
  g.class_names.resize(next);
  for (auto& [name, idx] : class_index) g.class_names[idx] = name;
  g.labels.resize(g.num_nodes);
  for (int i = 0; i < g.num_nodes; ++i) g.labels(i) = class_index.at(label_strings[i]);
  g.features.resize(g.num_nodes, Eigen::Index(feature_dim));
  for (int i = 0; i < g.num_nodes; ++i)
    for (size_t j = 0; j < feature_dim; ++j) g.features(i, Eigen::Index(j)) = feature_rows[i][j];

  // cites rows are `cited <TAB> citing`; store citing -> cited
  std::set<std::pair<int, int>> edge_set;
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2)
      throw ParseError(cites_path + ":" + std::to_string(line_no) +
                       ": expected `cited <TAB> citing`");
    auto cited = id_to_index.find(fields[0]);
    auto citing = id_to_index.find(fields[1]);
    if (cited == id_to_index.end() || citing == id_to_index.end()) {
      ++g.dropped_edges;  // dangling reference, no features/labels available
      continue;
    }
    if (cited->second == citing->second) {
      ++g.dropped_edges;
      continue;
    }
    if (!edge_set.emplace(citing->second, cited->second).second) ++g.dropped_edges;
  }
  g.edges.assign(edge_set.begin(), edge_set.end());
  finalize(g);
  return g;
}

Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges, Eigen::MatrixXf features,
                 Eigen::VectorXi labels, int num_classes) {
  Graph g;
  g.num_nodes = num_nodes;
  g.num_classes = num_classes;
  std::set<std::pair<int, int>> edge_set;
  for (auto& [s, d] : edges) {
    if (s < 0 || s >= num_nodes || d < 0 || d >= num_nodes)
      throw ValueError("make_graph: edge endpoint out of range");
    if (s != d) edge_set.emplace(s, d);
  }
  g.edges.assign(edge_set.begin(), edge_set.end());
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.node_ids.resize(num_nodes);
  for (int i = 0; i < num_nodes; ++i) g.node_ids[i] = "n" + std::to_string(i);
  g.class_names.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) g.class_names[c] = "c" + std::to_string(c);
  finalize(g);
  return g;
}

SplitAssignment random_split(const Graph& graph, uint64_t seed) {
  const int n = graph.num_nodes;
  if (n < 10) throw ValueError("random_split: need at least 10 nodes");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const int n_train = (n * 8) / 10;
  const int n_dev = (n - n_train) / 2;
  SplitAssignment s;
  s.seed = seed;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.dev.assign(perm.begin() + n_train, perm.begin() + n_train + n_dev);
  s.test.assign(perm.begin() + n_train + n_dev, perm.end());
  return s;
}

void save_split(const SplitAssignment& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write split file: " + path);
  out << "seed " << split.seed << "\n";
  auto section = [&](const char* name, const std::vector<int>& v) {
    out << name << " " << v.size() << "\n";
    for (size_t i = 0; i < v.size(); ++i) out << v[i] << (i + 1 == v.size() ? "\n" : " ");
    if (v.empty()) out << "\n";
  };
  section("train", split.train);
  section("dev", split.dev);
  section("test", split.test);
}

SplitAssignment load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open split file: " + path);
  SplitAssignment s;
  std::string tag;
  in >> tag >> s.seed;
  if (tag != "seed") throw ParseError(path + ": malformed split file");
  for (auto* vec : {&s.train, &s.dev, &s.test}) {
    size_t count = 0;
    if (!(in >> tag >> count)) throw ParseError(path + ": truncated split file");
    vec->resize(count);
    for (size_t i = 0; i < count; ++i)
      if (!(in >> (*vec)[i])) throw ParseError(path + ": truncated split file");
  }
  return s;
}

SymAdjacency symmetrize(const Graph& graph) {
  std::set<std::pair<int, int>> sym;
  for (auto& [s, d] : graph.edges) {
    sym.emplace(s, d);
    sym.emplace(d, s);
  }
  SymAdjacency adj;
  adj.offsets.assign(graph.num_nodes + 1, 0);
  for (auto& [s, d] : sym) ++adj.offsets[s + 1];
  std::partial_sum(adj.offsets.begin(), adj.offsets.end(), adj.offsets.begin());
  adj.neighbors.reserve(sym.size());
  for (auto& [s, d] : sym) adj.neighbors.push_back(d);  // set order keeps rows sorted
  return adj;
}

SparseCsr<double> normalized_adjacency(const Graph& graph) {
  const int n = graph.num_nodes;
  SymAdjacency sym = symmetrize(graph);
  Eigen::VectorXd inv_sqrt_deg(n);
  for (int v = 0; v < n; ++v) inv_sqrt_deg(v) = 1.0 / std::sqrt(double(sym.degree(v) + 1));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(sym.neighbors.size() + size_t(n));
  for (int v = 0; v < n; ++v) {
    triplets.emplace_back(v, v, inv_sqrt_deg(v) * inv_sqrt_deg(v));
    for (const int* u = sym.begin(v); u != sym.end(v); ++u)
      triplets.emplace_back(v, *u, inv_sqrt_deg(v) * inv_sqrt_deg(*u));
  }
  SparseCsr<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

}  // namespace ssagcn
