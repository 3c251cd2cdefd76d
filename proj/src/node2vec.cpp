#include "ssagcn/node2vec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssagcn {

std::vector<double> transition_weights(const SymAdjacency& adj, int prev, int curr,
                                       const WalkConfig& config) {
  if (config.p <= 0.0 || config.q <= 0.0) throw ValueError("transition_weights: p, q must be > 0");
  const int deg = adj.degree(curr);
  std::vector<double> w(static_cast<size_t>(deg));
  if (deg == 0) return w;
  if (prev < 0) {
    std::fill(w.begin(), w.end(), 1.0 / double(deg));
    return w;
  }
  double total = 0.0;
  const int* nbrs = adj.begin(curr);
  for (int k = 0; k < deg; ++k) {
    int x = nbrs[k];
    double weight;
    if (x == prev)
      weight = 1.0 / config.p;
    else if (adj.adjacent(prev, x))
      weight = 1.0;
    else
      weight = 1.0 / config.q;
    w[size_t(k)] = weight;
    total += weight;
  }
  for (auto& v : w) v /= total;
  return w;
}

namespace {

int sample_from(const std::vector<double>& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = unif(rng);
  double acc = 0.0;
  for (size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (r < acc) return int(k);
  }
  return int(probs.size()) - 1;
}

inline float fast_sigmoid(float x) {
  if (x > 12.0f) return 1.0f;
  if (x < -12.0f) return 0.0f;
  return 1.0f / (1.0f + std::exp(-x));
}

}  // namespace

std::vector<std::vector<int>> generate_walks(const SymAdjacency& adj, int num_nodes,
                                             const WalkConfig& config, std::mt19937_64& rng) {
  std::vector<std::vector<int>> walks;
  walks.reserve(size_t(num_nodes) * size_t(config.walks_per_node));
  std::vector<int> starts(static_cast<size_t>(num_nodes));
  std::iota(starts.begin(), starts.end(), 0);
  for (int pass = 0; pass < config.walks_per_node; ++pass) {
    std::shuffle(starts.begin(), starts.end(), rng);
    for (int start : starts) {
      std::vector<int> walk{start};
      int prev = -1;
      while (int(walk.size()) < config.walk_length) {
        int curr = walk.back();
        auto probs = transition_weights(adj, prev, curr, config);
        if (probs.empty()) break;  // isolated node, walk truncates
        int next = adj.begin(curr)[sample_from(probs, rng)];
        prev = curr;
        walk.push_back(next);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

NodeEmbeddings skipgram_train(const std::vector<std::vector<int>>& walks, int num_nodes,
                              const WalkConfig& config, std::mt19937_64& rng) {
  if (walks.empty()) throw ValueError("skipgram_train: empty walk corpus");
  const int dim = config.dim;

  NodeEmbeddings emb;
  emb.input.resize(num_nodes, dim);
  emb.context = Eigen::MatrixXf::Zero(num_nodes, dim);
  std::uniform_real_distribution<float> init(-0.5f / float(dim), 0.5f / float(dim));
  for (int i = 0; i < num_nodes; ++i)
    for (int j = 0; j < dim; ++j) emb.input(i, j) = init(rng);

  // unigram^0.75 table for negative sampling
  std::vector<double> freq(static_cast<size_t>(num_nodes), 0.0);
  size_t total_positions = 0;
  for (auto& walk : walks) {
    for (int v : walk) freq[size_t(v)] += 1.0;
    total_positions += walk.size();
  }
  std::vector<double> neg_cdf(static_cast<size_t>(num_nodes));
  double acc = 0.0;
  for (int v = 0; v < num_nodes; ++v) {
    acc += std::pow(freq[size_t(v)], 0.75);
    neg_cdf[size_t(v)] = acc;
  }
  if (acc <= 0.0) throw ValueError("skipgram_train: all walks are empty");
  std::uniform_real_distribution<double> unif(0.0, acc);
  auto sample_negative = [&]() {
    auto it = std::upper_bound(neg_cdf.begin(), neg_cdf.end(), unif(rng));
    return int(it - neg_cdf.begin());
  };

  const size_t total_centers = total_positions * size_t(config.epochs);
  size_t processed = 0;
  Eigen::VectorXf center_update(dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& walk : walks) {
      const int len = int(walk.size());
      for (int i = 0; i < len; ++i, ++processed) {
        const double progress = double(processed) / double(std::max<size_t>(total_centers, 1));
        const float lr = float(std::max(config.min_learning_rate,
                                        config.learning_rate * (1.0 - progress)));
        const int u = walk[i];
        auto input_u = emb.input.row(u);
        const int lo = std::max(0, i - config.window);
        const int hi = std::min(len - 1, i + config.window);
        for (int c = lo; c <= hi; ++c) {
          if (c == i) continue;
          center_update.setZero();
          // positive pair (u, walk[c]) then k negatives
          for (int s = 0; s <= config.negatives_per_positive; ++s) {
            const int target = s == 0 ? walk[c] : sample_negative();
            const float label = s == 0 ? 1.0f : 0.0f;
            if (s != 0 && target == walk[c]) continue;
            auto ctx = emb.context.row(target);
            const float g = (label - fast_sigmoid(input_u.dot(ctx))) * lr;
            center_update += g * ctx.transpose();
            emb.context.row(target) += g * input_u;
          }
          emb.input.row(u) += center_update.transpose();
        }
      }
    }
  }
  return emb;
}

NodeEmbeddings train_node2vec(const Graph& graph, const WalkConfig& config) {
  SymAdjacency adj = symmetrize(graph);
  std::mt19937_64 rng(config.seed);
  auto walks = generate_walks(adj, graph.num_nodes, config, rng);
  return skipgram_train(walks, graph.num_nodes, config, rng);
}

}  // namespace ssagcn
