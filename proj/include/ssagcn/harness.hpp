#pragma once

#include "ssagcn/graph.hpp"
#include "ssagcn/model.hpp"
#include "ssagcn/node2vec.hpp"
#include "ssagcn/transe.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssagcn {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string name = "dataset";
  std::string content_path;
  std::string cites_path;
};

struct AttentionConfig {
  int dim = 64;
  int heads = 1;
};

struct RunConfig {
  int runs = 10;
  uint64_t base_seed = 0;
  std::string out_dir = "runs/out";
  bool fixed_split = false;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  WalkConfig node2vec;
  KGEConfig transe;
  ModelConfig model;  // branches/use_attention/seed are set per variant
  AttentionConfig attention;
  RunConfig run;

  // Flat sectioned key=value file; unknown sections or keys are hard errors.
  static ExperimentConfig load(const std::string& path);

  // Canonical serialization of the semantically meaningful fields (out_dir
  // excluded) and its FNV-1a fingerprint.
  std::string canonical() const;
  uint64_t fingerprint() const;
};

struct RunResult {
  std::string variant;
  int run = 0;
  uint64_t seed = 0;
  double dev_acc = 0.0;
  double test_acc = 0.0;
  int epochs = 0;
  double train_seconds = 0.0;
};

struct VariantSummary {
  std::string variant;
  std::vector<RunResult> runs;
  double dev_mean = 0.0, dev_std = 0.0;
  double test_mean = 0.0, test_std = 0.0;
};

struct VariantSpec {
  std::string name;
  std::vector<Branch> branches;
  bool use_attention = false;
};

// Maps a CLI variant name to its branch configuration; throws ConfigError on
// unknown names. `ablation` expands to four specs via ablation_ladder().
VariantSpec variant_spec(const std::string& name);
std::vector<VariantSpec> ablation_ladder();

class Harness {
 public:
  explicit Harness(ExperimentConfig config) : cfg_(std::move(config)) {}

  const ExperimentConfig& config() const { return cfg_; }

  std::string graph_cache_path() const;
  std::string features_path() const;
  std::string split_path(int run) const;
  std::string structure_tsv_path() const;
  std::string semantic_tsv_path() const;
  std::string results_path() const;

  // Loads the raw dataset and persists graph cache, features tensor, and
  // per-run split files. No-op when the cache fingerprint already matches.
  void prepare();

  // Trains one embedding table ("structure" or "semantic") and writes the TSV.
  void embed(const std::string& which);

  // Runs `runs` seeded training runs of the variant (ladder for "ablation"),
  // appending run and summary records to the JSON-lines results file.
  std::vector<VariantSummary> train(const std::string& variant);

  // Writes labeled embedding TSVs plus offline-fused variants for plotting.
  void export_embeddings();

  // Aggregates the results file into a text table; writes report.json.
  std::string report();

  // Loads the prepared graph; privacy variants pass with_features=false and
  // never touch the features tensor file.
  Graph load_cached_graph(bool with_features) const;

 private:
  VariantSummary run_variant(const VariantSpec& spec, const Graph& graph,
                             const std::optional<Eigen::MatrixXf>& structure,
                             const std::optional<Eigen::MatrixXf>& semantic);

  ExperimentConfig cfg_;
};

double mean(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

}  // namespace ssagcn
