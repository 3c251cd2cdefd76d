#pragma once

#include "ssagcn/tensor.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ssagcn {

// Flat little-endian tensor file: 4 magic bytes "SSAT", uint64 rows, uint64
// cols, then row-major float32 values.
void save_tensor(const Eigen::MatrixXf& m, const std::string& path);
Eigen::MatrixXf load_tensor(const std::string& path);

// Embedding TSV: header `count <TAB> dim`, then `node_id <TAB> v_1 ... v_d`
// rows in node order. An optional label column may be appended per row.
void write_embeddings_tsv(const std::vector<std::string>& node_ids, const Eigen::MatrixXf& emb,
                          const std::string& path, const std::vector<int>* labels = nullptr);

struct EmbeddingsTsv {
  std::vector<std::string> node_ids;
  Eigen::MatrixXf values;
};

EmbeddingsTsv read_embeddings_tsv(const std::string& path);

}  // namespace ssagcn
