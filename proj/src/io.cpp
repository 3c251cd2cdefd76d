#include "ssagcn/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace ssagcn {

namespace {
constexpr char kMagic[4] = {'S', 'S', 'A', 'T'};
}

void save_tensor(const Eigen::MatrixXf& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValueError("cannot write tensor file: " + path);
  out.write(kMagic, 4);
  uint64_t rows = uint64_t(m.rows()), cols = uint64_t(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      float v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!out) throw ValueError("short write on tensor file: " + path);
}

Eigen::MatrixXf load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValueError("cannot open tensor file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ValueError("bad magic in tensor file: " + path);
  uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  Eigen::MatrixXf m = Eigen::MatrixXf::Zero(Eigen::Index(rows), Eigen::Index(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      float v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(i, j) = v;
    }
  if (!in) throw ValueError("truncated tensor file: " + path);
  return m;
}

void write_embeddings_tsv(const std::vector<std::string>& node_ids, const Eigen::MatrixXf& emb,
                          const std::string& path, const std::vector<int>* labels) {
  if (Eigen::Index(node_ids.size()) != emb.rows())
    throw ValueError("write_embeddings_tsv: id/row count mismatch");
  std::ofstream out(path);
  if (!out) throw ValueError("cannot write embeddings file: " + path);
  out << emb.rows() << "\t" << emb.cols() << "\n";
  std::ostringstream row;
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    row.str("");
    row << node_ids[size_t(i)];
    for (Eigen::Index j = 0; j < emb.cols(); ++j) row << "\t" << emb(i, j);
    if (labels) row << "\t" << (*labels)[size_t(i)];
    out << row.str() << "\n";
  }
}

EmbeddingsTsv read_embeddings_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValueError("cannot open embeddings file: " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream header(line);
  Eigen::Index rows = 0, cols = 0;
  header >> rows >> cols;
  if (!header || rows < 0 || cols <= 0) throw ValueError("bad embeddings header: " + path);
  EmbeddingsTsv e;
  e.node_ids.resize(size_t(rows));
  e.values.resize(rows, cols);
  // trailing columns (labels in exported tables) are ignored
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ValueError("truncated embeddings file: " + path);
    std::istringstream fields(line);
    fields >> e.node_ids[size_t(i)];
    for (Eigen::Index j = 0; j < cols; ++j) fields >> e.values(i, j);
    if (!fields) throw ValueError("truncated embeddings file: " + path);
  }
  return e;
}

}  // namespace ssagcn
