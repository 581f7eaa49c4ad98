#include "i2a/embed.hpp"

#include <cctype>
#include <fstream>

#include "i2a/errors.hpp"
#include "i2a/hashing.hpp"
#include "i2a/serialize.hpp"
#include "i2a/text.hpp"

namespace i2a {

std::string normalize_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string norm = normalize_text(text);
  std::size_t pos = 0;
  while (pos < norm.size()) {
    std::size_t end = norm.find(' ', pos);
    if (end == std::string::npos) end = norm.size();
    if (end > pos) tokens.push_back(norm.substr(pos, end - pos));
    pos = end + 1;
  }
  return tokens;
}

HashedNgramEmbedder::HashedNgramEmbedder(int dim) : dim_(dim) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
}

namespace {

void accumulate_feature(const std::string& feature, int dim,
                        Eigen::VectorXd& acc) {
  std::uint64_t bucket = fnv1a64(feature, fnv1a64(kEmbedBucketSalt));
  std::uint64_t sign = fnv1a64(feature, fnv1a64(kEmbedSignSalt));
  acc[static_cast<Eigen::Index>(bucket % static_cast<std::uint64_t>(dim))] +=
      (sign & 1) ? 1.0 : -1.0;
}

}  // namespace

Eigen::VectorXd HashedNgramEmbedder::embed(const std::string& text) const {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty())
    throw InputError("cannot embed empty or whitespace-only text");

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
  for (const std::string& t : tokens) accumulate_feature(t, dim_, acc);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    accumulate_feature(tokens[i] + " " + tokens[i + 1], dim_, acc);

  double norm = acc.norm();
  // At least one unigram exists, so norm can only vanish through bucket
  // cancellation of identical features; guard anyway.
  if (norm <= 0.0) {
    acc[0] = 1.0;
    norm = 1.0;
  }
  return acc / norm;
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open embedding file: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "I2AEMBED")
    throw FormatError("bad embedding file magic");
  std::uint32_t version = read_u32(is);
  if (version != 1) throw FormatError("unsupported embedding file version");
  dim_ = static_cast<int>(read_u32(is));
  if (dim_ <= 0) throw FormatError("bad embedding dimension");
  std::uint64_t count = read_u64(is);
  vectors_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t key = read_u64(is);
    Eigen::VectorXd v(dim_);
    for (int j = 0; j < dim_; ++j) v[j] = read_f64(is);
    vectors_.emplace(key, std::move(v));
  }
}

Eigen::VectorXd FileEmbeddingProvider::embed(const std::string& text) const {
  std::string norm = normalize_text(text);
  if (norm.empty())
    throw InputError("cannot embed empty or whitespace-only text");
  auto it = vectors_.find(fnv1a64(norm));
  if (it == vectors_.end())
    throw InputError("no precomputed embedding for instruction: " + text);
  return it->second;
}

void write_embedding_file(
    const std::string& path,
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& entries) {
  if (entries.empty()) throw InputError("no embeddings to write");
  const int dim = static_cast<int>(entries.front().second.size());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os.write("I2AEMBED", 8);
  write_u32(os, 1);
  write_u32(os, static_cast<std::uint32_t>(dim));
  write_u64(os, entries.size());
  for (const auto& [text, vec] : entries) {
    if (vec.size() != dim)
      throw InputError("inconsistent embedding dimensions in batch");
    write_u64(os, fnv1a64(normalize_text(text)));
    for (int j = 0; j < dim; ++j) write_f64(os, vec[j]);
  }
  if (!os) throw FormatError("write failed: " + path);
}

Eigen::MatrixXd tile_embedding(const Eigen::VectorXd& e, int length) {
  if (length < 1) throw InputError("tile length must be >= 1");
  Eigen::MatrixXd rows(length, e.size());
  for (int t = 0; t < length; ++t) rows.row(t) = e.transpose();
  return rows;
}

}  // namespace i2a
