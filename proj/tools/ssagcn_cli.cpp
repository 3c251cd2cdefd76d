#include "ssagcn/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

using namespace ssagcn;

int main(int argc, char** argv) {
  CLI::App app{"SSA-GCN experiment harness: unsupervised structural/semantic node embeddings, "
               "cross-attention fusion, and multi-branch GCN node classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed_override = -1;
  int runs_override = -1;
  bool deterministic = false;
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--seed", seed_override, "override run.base_seed");
  app.add_option("--runs", runs_override, "override run.runs");
  app.add_flag("--deterministic", deterministic,
               "force single-threaded deterministic execution (always on in this build)");

  auto* prepare = app.add_subcommand("prepare", "load the raw dataset, write graph cache and splits");
  auto* embed = app.add_subcommand("embed", "pretrain one unsupervised embedding table");
  std::string which;
  embed->add_option("--which", which, "structure | semantic")->required();
  auto* train = app.add_subcommand("train", "run seeded training runs of a model variant");
  std::string variant;
  train->add_option("--variant", variant,
                    "gcn | ssa-gcn | privacy-ssa-gcn | privacy-gcn+ge | privacy-gcn+kge | "
                    "privacy-gcn+kge+ge | ablation")
      ->required();
  auto* export_cmd = app.add_subcommand("export", "write labeled + fused embedding TSVs");
  auto* report = app.add_subcommand("report", "aggregate the results file into a table");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed_override >= 0) cfg.run.base_seed = uint64_t(seed_override);
    if (runs_override >= 0) cfg.run.runs = runs_override;
    Harness harness(cfg);

    if (prepare->parsed()) {
      harness.prepare();
    } else if (embed->parsed()) {
      harness.embed(which);
    } else if (train->parsed()) {
      for (auto& s : harness.train(variant))
        std::cout << s.variant << ": dev " << s.dev_mean << "+-" << s.dev_std << " test "
                  << s.test_mean << "+-" << s.test_std << " over " << s.runs.size() << " runs\n";
    } else if (export_cmd->parsed()) {
      harness.export_embeddings();
    } else if (report->parsed()) {
      std::cout << harness.report();
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericsError& e) {
    std::cerr << "numerics error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
