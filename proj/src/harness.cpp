#include "ssagcn/harness.hpp"

#include "ssagcn/attention.hpp"
#include "ssagcn/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ssagcn {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config: key `" + key + "` expects an integer, got `" + v + "`");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config: key `" + key + "` expects a number, got `" + v + "`");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: key `" + key + "` expects true/false, got `" + v + "`");
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void require_artifact(const std::string& path, const std::string& producer) {
  if (!fs::exists(path))
    throw ConfigError("missing artifact `" + path + "`; run `" + producer + "` first");
}

Eigen::MatrixXf row_normalized(const Eigen::MatrixXf& m) {
  Eigen::MatrixXf out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    float s = out.row(i).sum();
    if (s > 0.0f) out.row(i) /= s;
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      if (section != "dataset" && section != "node2vec" && section != "transe" &&
          section != "model" && section != "attention" && section != "run")
        throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown section [" + section +
                          "]");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected `key = value`");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    std::string qualified = section + "." + key;

    if (section == "dataset") {
      if (key == "name") cfg.dataset.name = value;
      else if (key == "content") cfg.dataset.content_path = value;
      else if (key == "cites") cfg.dataset.cites_path = value;
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else if (section == "node2vec") {
      if (key == "p") cfg.node2vec.p = to_double(value, qualified);
      else if (key == "q") cfg.node2vec.q = to_double(value, qualified);
      else if (key == "walk_length") cfg.node2vec.walk_length = int(to_int(value, qualified));
      else if (key == "walks_per_node") cfg.node2vec.walks_per_node = int(to_int(value, qualified));
      else if (key == "window") cfg.node2vec.window = int(to_int(value, qualified));
      else if (key == "dim") cfg.node2vec.dim = int(to_int(value, qualified));
      else if (key == "learning_rate") cfg.node2vec.learning_rate = to_double(value, qualified);
      else if (key == "min_learning_rate") cfg.node2vec.min_learning_rate = to_double(value, qualified);
      else if (key == "negatives") cfg.node2vec.negatives_per_positive = int(to_int(value, qualified));
      else if (key == "epochs") cfg.node2vec.epochs = int(to_int(value, qualified));
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else if (section == "transe") {
      if (key == "dim") cfg.transe.dim = int(to_int(value, qualified));
      else if (key == "batch_size") cfg.transe.batch_size = int(to_int(value, qualified));
      else if (key == "learning_rate") cfg.transe.learning_rate = to_double(value, qualified);
      else if (key == "epochs") cfg.transe.epochs = int(to_int(value, qualified));
      else if (key == "margin") cfg.transe.margin = to_double(value, qualified);
      else if (key == "both_directions") cfg.transe.both_directions = to_bool(value, qualified);
      else if (key == "distance") {
        if (value == "l1") cfg.transe.l1_distance = true;
        else if (value == "l2") cfg.transe.l1_distance = false;
        else throw ConfigError("config: transe.distance must be l1 or l2");
      }
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else if (section == "model") {
      if (key == "hidden_dim") cfg.model.hidden_dim = int(to_int(value, qualified));
      else if (key == "num_layers") cfg.model.num_layers = int(to_int(value, qualified));
      else if (key == "dropout") cfg.model.dropout = to_double(value, qualified);
      else if (key == "learning_rate") cfg.model.learning_rate = to_double(value, qualified);
      else if (key == "weight_decay") cfg.model.weight_decay = to_double(value, qualified);
      else if (key == "max_epochs") cfg.model.max_epochs = int(to_int(value, qualified));
      else if (key == "patience") cfg.model.patience = int(to_int(value, qualified));
      else if (key == "optimizer") {
        if (value == "sgd") cfg.model.optimizer = OptKind::SGD;
        else if (value == "adam") cfg.model.optimizer = OptKind::Adam;
        else if (value == "adagrad") cfg.model.optimizer = OptKind::Adagrad;
        else throw ConfigError("config: model.optimizer must be sgd/adam/adagrad");
      }
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else if (section == "attention") {
      if (key == "dim") cfg.attention.dim = int(to_int(value, qualified));
      else if (key == "heads") cfg.attention.heads = int(to_int(value, qualified));
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else if (section == "run") {
      if (key == "runs") cfg.run.runs = int(to_int(value, qualified));
      else if (key == "base_seed") cfg.run.base_seed = uint64_t(to_int(value, qualified));
      else if (key == "out_dir") cfg.run.out_dir = value;
      else if (key == "fixed_split") cfg.run.fixed_split = to_bool(value, qualified);
      else throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key `" + qualified + "`");
    } else {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": key outside any section");
    }
  }
  if (cfg.run.runs < 1) throw ConfigError("config: run.runs must be >= 1");
  return cfg;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "dataset.name=" << dataset.name << ";dataset.content=" << dataset.content_path
    << ";dataset.cites=" << dataset.cites_path;
  s << ";node2vec.p=" << node2vec.p << ";q=" << node2vec.q << ";walk_length=" << node2vec.walk_length
    << ";walks_per_node=" << node2vec.walks_per_node << ";window=" << node2vec.window
    << ";dim=" << node2vec.dim << ";lr=" << node2vec.learning_rate
    << ";min_lr=" << node2vec.min_learning_rate << ";neg=" << node2vec.negatives_per_positive
    << ";epochs=" << node2vec.epochs;
  s << ";transe.dim=" << transe.dim << ";batch=" << transe.batch_size
    << ";lr=" << transe.learning_rate << ";epochs=" << transe.epochs << ";margin=" << transe.margin
    << ";l1=" << transe.l1_distance << ";both=" << transe.both_directions;
  s << ";model.hidden=" << model.hidden_dim << ";layers=" << model.num_layers
    << ";dropout=" << model.dropout << ";lr=" << model.learning_rate
    << ";wd=" << model.weight_decay << ";opt=" << to_string(model.optimizer)
    << ";max_epochs=" << model.max_epochs << ";patience=" << model.patience;
  s << ";attention.dim=" << attention.dim << ";heads=" << attention.heads;
  s << ";run.runs=" << run.runs << ";base_seed=" << run.base_seed
    << ";fixed_split=" << run.fixed_split;
  return s.str();
}

uint64_t ExperimentConfig::fingerprint() const { return fnv1a(canonical()); }

VariantSpec variant_spec(const std::string& name) {
  using B = Branch;
  if (name == "gcn") return {name, {B::Features}, false};
  if (name == "ssa-gcn") return {name, {B::Features, B::GraphEmbed, B::KgEmbed}, true};
  if (name == "ssa-gcn--attention") return {name, {B::Features, B::GraphEmbed, B::KgEmbed}, false};
  if (name == "ssa-gcn--attention-kge") return {name, {B::Features, B::GraphEmbed}, false};
  if (name == "privacy-ssa-gcn") return {name, {B::GraphEmbed, B::KgEmbed}, true};
  if (name == "privacy-gcn+ge") return {name, {B::GraphEmbed}, false};
  if (name == "privacy-gcn+kge") return {name, {B::KgEmbed}, false};
  if (name == "privacy-gcn+kge+ge") return {name, {B::GraphEmbed, B::KgEmbed}, false};
  throw ConfigError("unknown variant `" + name +
                    "` (expected gcn, ssa-gcn, ssa-gcn--attention, ssa-gcn--attention-kge, "
                    "privacy-ssa-gcn, privacy-gcn+ge, privacy-gcn+kge, privacy-gcn+kge+ge, "
                    "or ablation)");
}

std::vector<VariantSpec> ablation_ladder() {
  return {variant_spec("ssa-gcn"), variant_spec("ssa-gcn--attention"),
          variant_spec("ssa-gcn--attention-kge"), variant_spec("gcn")};
}

std::string Harness::graph_cache_path() const { return cfg_.run.out_dir + "/graph.cache"; }
std::string Harness::features_path() const { return cfg_.run.out_dir + "/features.bin"; }
std::string Harness::split_path(int run) const {
  return cfg_.run.out_dir + "/split_run" + std::to_string(run) + ".txt";
}
std::string Harness::structure_tsv_path() const { return cfg_.run.out_dir + "/structure.tsv"; }
std::string Harness::semantic_tsv_path() const { return cfg_.run.out_dir + "/semantic.tsv"; }
std::string Harness::results_path() const { return cfg_.run.out_dir + "/results.jsonl"; }

void Harness::prepare() {
  fs::create_directories(cfg_.run.out_dir);
  if (cfg_.dataset.content_path.empty() || cfg_.dataset.cites_path.empty())
    throw ConfigError("config: dataset.content and dataset.cites are required for prepare");
  if (!fs::exists(cfg_.dataset.content_path))
    throw ConfigError("missing content file: " + cfg_.dataset.content_path);
  if (!fs::exists(cfg_.dataset.cites_path))
    throw ConfigError("missing cites file: " + cfg_.dataset.cites_path);

  std::ostringstream fp;
  fp << std::hex << fnv1a(cfg_.dataset.content_path + "|" + cfg_.dataset.cites_path + "|" +
                          std::to_string(cfg_.run.runs) + "|" + std::to_string(cfg_.run.base_seed) +
                          "|" + std::to_string(cfg_.run.fixed_split));
  const std::string fingerprint = fp.str();

  if (fs::exists(graph_cache_path())) {
    std::ifstream in(graph_cache_path());
    std::string header, tag, cached;
    std::getline(in, header);
    in >> tag >> cached;
    if (header == "ssagcn-graph-cache v1" && tag == "fingerprint" && cached == fingerprint) {
      std::cout << "prepare: cache up to date (" << fingerprint << ")\n";
      return;
    }
  }

  Graph g = load_citation_dataset(cfg_.dataset.content_path, cfg_.dataset.cites_path);
  std::cout << "prepare: " << g.num_nodes << " nodes, " << g.num_classes << " classes, "
            << g.feature_dim() << " features, " << g.edges.size() << " edges ("
            << g.dropped_edges << " dropped)\n";

  std::ofstream out(graph_cache_path());
  if (!out) throw ConfigError("cannot write graph cache: " + graph_cache_path());
  out << "ssagcn-graph-cache v1\n";
  out << "fingerprint " << fingerprint << "\n";
  out << "nodes " << g.num_nodes << " classes " << g.num_classes << " feature_dim "
      << g.feature_dim() << " dropped " << g.dropped_edges << "\n";
  for (auto& c : g.class_names) out << c << "\n";
  for (int i = 0; i < g.num_nodes; ++i) out << g.node_ids[i] << " " << g.labels(i) << "\n";
  out << "edges " << g.edges.size() << "\n";
  for (auto& [s, d] : g.edges) out << s << " " << d << "\n";
  out.close();
  save_tensor(g.features, features_path());

  for (int r = 0; r < cfg_.run.runs; ++r) {
    uint64_t seed = cfg_.run.fixed_split ? cfg_.run.base_seed : cfg_.run.base_seed + uint64_t(r);
    save_split(random_split(g, seed), split_path(r));
  }
}

Graph Harness::load_cached_graph(bool with_features) const {
  require_artifact(graph_cache_path(), "prepare");
  std::ifstream in(graph_cache_path());
  std::string header;
  std::getline(in, header);
  if (header != "ssagcn-graph-cache v1")
    throw ConfigError("unrecognized graph cache: " + graph_cache_path());
  std::string tag, fingerprint;
  in >> tag >> fingerprint;
  int num_nodes = 0, num_classes = 0, feature_dim = 0, dropped = 0;
  in >> tag >> num_nodes >> tag >> num_classes >> tag >> feature_dim >> tag >> dropped;

  Graph g;
  g.num_nodes = num_nodes;
  g.num_classes = num_classes;
  g.dropped_edges = dropped;
  g.class_names.resize(size_t(num_classes));
  for (auto& c : g.class_names) in >> c;
  g.node_ids.resize(size_t(num_nodes));
  g.labels.resize(num_nodes);
  for (int i = 0; i < num_nodes; ++i) in >> g.node_ids[size_t(i)] >> g.labels(i);
  size_t num_edges = 0;
  in >> tag >> num_edges;
  g.edges.resize(num_edges);
  for (auto& [s, d] : g.edges) in >> s >> d;
  if (!in) throw ConfigError("truncated graph cache: " + graph_cache_path());

  if (with_features) {
    require_artifact(features_path(), "prepare");
    g.features = load_tensor(features_path());
  } else {
    g.features.resize(num_nodes, 0);
  }
  // rebuild CSR through the validated constructor path
  Graph rebuilt = make_graph(g.num_nodes, g.edges, std::move(g.features), std::move(g.labels),
                             g.num_classes);
  rebuilt.node_ids = std::move(g.node_ids);
  rebuilt.class_names = std::move(g.class_names);
  rebuilt.dropped_edges = g.dropped_edges;
  return rebuilt;
}

void Harness::embed(const std::string& which) {
  Graph g = load_cached_graph(false);
  const double t0 = now_seconds();
  if (which == "structure") {
    WalkConfig wc = cfg_.node2vec;
    wc.seed = cfg_.run.base_seed;
    NodeEmbeddings emb = train_node2vec(g, wc);
    write_embeddings_tsv(g.node_ids, emb.input, structure_tsv_path());
    std::cout << "embed structure: " << emb.input.rows() << " x " << emb.input.cols() << " in "
              << std::fixed << std::setprecision(1) << now_seconds() - t0 << "s\n";
  } else if (which == "semantic") {
    KGEConfig kc = cfg_.transe;
    kc.seed = cfg_.run.base_seed;
    TripleSet triples = edges_to_triples(g, kc.both_directions);
    KGEmbeddings emb = train_transe(triples, kc);
    write_embeddings_tsv(g.node_ids, emb.entities, semantic_tsv_path());
    std::vector<std::string> rel_ids{"cites"};
    write_embeddings_tsv(rel_ids, emb.relations, cfg_.run.out_dir + "/semantic_relations.tsv");
    std::cout << "embed semantic: " << emb.entities.rows() << " x " << emb.entities.cols()
              << " in " << std::fixed << std::setprecision(1) << now_seconds() - t0 << "s\n";
  } else {
    throw ConfigError("embed: --which must be `structure` or `semantic`");
  }
}

VariantSummary Harness::run_variant(const VariantSpec& spec, const Graph& graph,
                                    const std::optional<Eigen::MatrixXf>& structure,
                                    const std::optional<Eigen::MatrixXf>& semantic) {
  SparseCsr<double> adj_d = normalized_adjacency(graph);
  auto adj = std::make_shared<const SparseCsr<float>>(adj_d.cast<float>());

  ModelInputs<float> inputs;
  std::map<Branch, int> dims;
  ModelConfig mc = cfg_.model;
  mc.branches = spec.branches;
  mc.use_attention = spec.use_attention;
  mc.attention_dim = cfg_.attention.dim;
  mc.attention_heads = cfg_.attention.heads;
  if (mc.has_branch(Branch::Features)) {
    inputs.features = Tensor<float>::constant(row_normalized(graph.features));
    dims[Branch::Features] = graph.feature_dim();
  }
  if (mc.has_branch(Branch::GraphEmbed)) {
    inputs.graph_embed = Tensor<float>::constant(*structure);
    dims[Branch::GraphEmbed] = int(structure->cols());
  }
  if (mc.has_branch(Branch::KgEmbed)) {
    inputs.kg_embed = Tensor<float>::constant(*semantic);
    dims[Branch::KgEmbed] = int(semantic->cols());
  }

  VariantSummary summary;
  summary.variant = spec.name;
  std::vector<double> devs, tests;
  for (int r = 0; r < cfg_.run.runs; ++r) {
    const uint64_t seed = cfg_.run.base_seed + uint64_t(r);
    require_artifact(split_path(r), "prepare");
    SplitAssignment split = load_split(split_path(r));
    mc.seed = seed;

    const double t0 = now_seconds();
    SsaGcnModel<float> model(mc, adj, dims, graph.num_classes);
    TrainOutcome outcome = train_model(model, inputs, graph.labels, split);
    std::mt19937_64 eval_rng(seed);
    Tensor<float> logits = model.forward(inputs, false, eval_rng);

    RunResult rr;
    rr.variant = spec.name;
    rr.run = r;
    rr.seed = seed;
    rr.dev_acc = evaluate(logits.value(), graph.labels, split.dev);
    rr.test_acc = evaluate(logits.value(), graph.labels, split.test);
    rr.epochs = int(outcome.log.size());
    rr.train_seconds = now_seconds() - t0;
    summary.runs.push_back(rr);
    devs.push_back(rr.dev_acc);
    tests.push_back(rr.test_acc);

    if (r == 0) {  // checkpoint of the first run
      std::string ckpt_dir = cfg_.run.out_dir + "/checkpoint_" + spec.name;
      fs::create_directories(ckpt_dir);
      auto params = model.parameters();
      json manifest;
      manifest["variant"] = spec.name;
      manifest["use_attention"] = spec.use_attention;
      manifest["branches"] = json::array();
      for (Branch b : spec.branches) manifest["branches"].push_back(to_string(b));
      manifest["tensors"] = json::array();
      for (size_t k = 0; k < params.size(); ++k) {
        std::string file = "param" + std::to_string(k) + ".bin";
        save_tensor(params[k].value().cast<float>(), ckpt_dir + "/" + file);
        manifest["tensors"].push_back(file);
      }
      std::ofstream mout(ckpt_dir + "/manifest.json");
      mout << manifest.dump(2) << "\n";
    }
    std::cout << spec.name << " run " << r << ": dev " << std::fixed << std::setprecision(4)
              << rr.dev_acc << " test " << rr.test_acc << " (" << rr.epochs << " epochs)\n";
  }
  summary.dev_mean = mean(devs);
  summary.dev_std = sample_std(devs);
  summary.test_mean = mean(tests);
  summary.test_std = sample_std(tests);
  return summary;
}

std::vector<VariantSummary> Harness::train(const std::string& variant) {
  std::vector<VariantSpec> specs =
      variant == "ablation" ? ablation_ladder() : std::vector<VariantSpec>{variant_spec(variant)};

  bool need_features = false, need_structure = false, need_semantic = false;
  for (auto& s : specs)
    for (Branch b : s.branches) {
      need_features |= b == Branch::Features;
      need_structure |= b == Branch::GraphEmbed;
      need_semantic |= b == Branch::KgEmbed;
    }
  Graph graph = load_cached_graph(need_features);

  std::optional<Eigen::MatrixXf> structure, semantic;
  if (need_structure) {
    require_artifact(structure_tsv_path(), "embed --which structure");
    structure = read_embeddings_tsv(structure_tsv_path()).values;
  }
  if (need_semantic) {
    require_artifact(semantic_tsv_path(), "embed --which semantic");
    semantic = read_embeddings_tsv(semantic_tsv_path()).values;
  }

  std::ostringstream fp;
  fp << std::hex << cfg_.fingerprint();

  std::vector<VariantSummary> summaries;
  std::ofstream results(results_path(), std::ios::app);
  for (auto& spec : specs) {
    VariantSummary s = run_variant(spec, graph, structure, semantic);
    for (auto& rr : s.runs) {
      json rec;
      rec["type"] = "run";
      rec["variant"] = rr.variant;
      rec["run"] = rr.run;
      rec["seed"] = rr.seed;
      rec["dev_acc"] = rr.dev_acc;
      rec["test_acc"] = rr.test_acc;
      rec["epochs"] = rr.epochs;
      rec["train_seconds"] = rr.train_seconds;
      rec["fingerprint"] = fp.str();
      results << rec.dump() << "\n";
    }
    json rec;
    rec["type"] = "summary";
    rec["variant"] = s.variant;
    rec["runs"] = s.runs.size();
    rec["dev_mean"] = s.dev_mean;
    rec["dev_std"] = s.dev_std;
    rec["test_mean"] = s.test_mean;
    rec["test_std"] = s.test_std;
    rec["fingerprint"] = fp.str();
    results << rec.dump() << "\n";
    summaries.push_back(std::move(s));
  }
  return summaries;
}

void Harness::export_embeddings() {
  Graph g = load_cached_graph(false);
  std::vector<int> labels(size_t(g.num_nodes));
  for (int i = 0; i < g.num_nodes; ++i) labels[size_t(i)] = g.labels(i);

  require_artifact(structure_tsv_path(), "embed --which structure");
  require_artifact(semantic_tsv_path(), "embed --which semantic");
  Eigen::MatrixXf hg = read_embeddings_tsv(structure_tsv_path()).values;
  Eigen::MatrixXf hkg = read_embeddings_tsv(semantic_tsv_path()).values;

  write_embeddings_tsv(g.node_ids, hg, cfg_.run.out_dir + "/export_structure.tsv", &labels);
  write_embeddings_tsv(g.node_ids, hkg, cfg_.run.out_dir + "/export_semantic.tsv", &labels);

  // Offline fusion with seeded random projections: geometry-only export for
  // external visualization, not the trained attention parameters.
  std::mt19937_64 rng(cfg_.run.base_seed);
  auto fuse = [&](const Eigen::MatrixXf& q_src, const Eigen::MatrixXf& values) {
    auto params = CrossAttentionParams<float>::init(int(q_src.cols()), cfg_.attention.dim,
                                                    cfg_.attention.heads, rng);
    Tensor<float> out = multi_head_cross_attention(Tensor<float>::constant(q_src),
                                                   Tensor<float>::constant(q_src),
                                                   Tensor<float>::constant(values), params);
    return Eigen::MatrixXf(out.value());
  };
  write_embeddings_tsv(g.node_ids, fuse(hkg, hg), cfg_.run.out_dir + "/export_fused_structure.tsv",
                       &labels);
  write_embeddings_tsv(g.node_ids, fuse(hg, hkg), cfg_.run.out_dir + "/export_fused_semantic.tsv",
                       &labels);
}

std::string Harness::report() {
  require_artifact(results_path(), "train");
  std::ifstream in(results_path());
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_variant;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (rec.value("type", "") != "run") continue;
    auto& [devs, tests] = by_variant[rec["variant"]];
    devs.push_back(rec["dev_acc"]);
    tests.push_back(rec["test_acc"]);
  }
  if (by_variant.empty()) throw ConfigError("report: no run records in " + results_path());

  std::ostringstream table;
  table << std::left << std::setw(28) << "variant" << std::setw(8) << "runs" << std::setw(18)
        << "dev (mean+-std)" << std::setw(18) << "test (mean+-std)" << "\n";
  json out = json::array();
  for (auto& [variant, accs] : by_variant) {
    auto& [devs, tests] = accs;
    std::ostringstream dev_s, test_s;
    dev_s << std::fixed << std::setprecision(4) << mean(devs) << "+-" << sample_std(devs);
    test_s << std::fixed << std::setprecision(4) << mean(tests) << "+-" << sample_std(tests);
    table << std::left << std::setw(28) << variant << std::setw(8) << devs.size() << std::setw(18)
          << dev_s.str() << std::setw(18) << test_s.str() << "\n";
    json row;
    row["variant"] = variant;
    row["runs"] = devs.size();
    row["dev_mean"] = mean(devs);
    row["dev_std"] = sample_std(devs);
    row["test_mean"] = mean(tests);
    row["test_std"] = sample_std(tests);
    out.push_back(row);
  }
  std::ofstream jout(cfg_.run.out_dir + "/report.json");
  jout << out.dump(2) << "\n";
  return table.str();
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / double(xs.size() - 1));
}

}  // namespace ssagcn
