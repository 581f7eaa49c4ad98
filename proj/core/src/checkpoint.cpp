#include <fstream>

#include "i2a/seqmodel.hpp"
#include "i2a/serialize.hpp"

namespace i2a {

namespace {

constexpr char kMagic[8] = {'I', '2', 'A', 'C', 'K', 'P', 'T', '1'};

void write_strings(std::ostream& os, const std::vector<std::string>& v) {
  write_u32(os, static_cast<std::uint32_t>(v.size()));
  for (const std::string& s : v) write_string(os, s);
}

std::vector<std::string> read_strings(std::istream& is) {
  std::uint32_t n = read_u32(is);
  std::vector<std::string> v;
  v.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) v.push_back(read_string(is));
  return v;
}

}  // namespace

template <class S>
void save_checkpoint(const std::string& path, InstructionParserT<S>& parser) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os.write(kMagic, 8);

  const ModelShape& sh = parser.shape;
  for (int v : {sh.embed_dim, sh.seq_len, sh.n_classes, sh.input_units,
                sh.heads, sh.head_dim, sh.ff_units, sh.encoder_units,
                sh.decoder_units})
    write_u32(os, static_cast<std::uint32_t>(v));

  const TrainConfig& tc = parser.train_config;
  write_u32(os, static_cast<std::uint32_t>(tc.batch_size));
  write_f64(os, tc.lr);
  write_u32(os, static_cast<std::uint32_t>(tc.patience));
  write_f64(os, tc.min_delta);
  write_u32(os, static_cast<std::uint32_t>(tc.max_epochs));
  write_f64(os, tc.lambda_recon);
  write_u64(os, tc.seed);
  write_u32(os, static_cast<std::uint32_t>(tc.lr_plateau));
  write_f64(os, tc.lr_floor);
  write_u64(os, parser.corpus_seed);

  write_strings(os, parser.vocab);
  write_strings(os, parser.object_lexicon);
  write_strings(os, parser.destination_lexicon);

  auto params = parser.model.params();
  write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    write_string(os, p.name);
    write_u32(os, static_cast<std::uint32_t>(p.value->rows()));
    write_u32(os, static_cast<std::uint32_t>(p.value->cols()));
    // Tensors stored row-major as 64-bit floats regardless of the working
    // scalar type.
    for (Eigen::Index r = 0; r < p.value->rows(); ++r)
      for (Eigen::Index c = 0; c < p.value->cols(); ++c)
        write_f64(os, static_cast<double>((*p.value)(r, c)));
  }
  if (!os) throw FormatError("write failed: " + path);
}

template <class S>
InstructionParserT<S> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != std::string(kMagic, 8))
    throw FormatError("not an i2a checkpoint: " + path);

  InstructionParserT<S> parser;
  ModelShape sh;
  sh.embed_dim = static_cast<int>(read_u32(is));
  sh.seq_len = static_cast<int>(read_u32(is));
  sh.n_classes = static_cast<int>(read_u32(is));
  sh.input_units = static_cast<int>(read_u32(is));
  sh.heads = static_cast<int>(read_u32(is));
  sh.head_dim = static_cast<int>(read_u32(is));
  sh.ff_units = static_cast<int>(read_u32(is));
  sh.encoder_units = static_cast<int>(read_u32(is));
  sh.decoder_units = static_cast<int>(read_u32(is));
  parser.shape = sh;
  parser.model = SequenceModelT<S>(sh);

  TrainConfig tc;
  tc.batch_size = static_cast<int>(read_u32(is));
  tc.lr = read_f64(is);
  tc.patience = static_cast<int>(read_u32(is));
  tc.min_delta = read_f64(is);
  tc.max_epochs = static_cast<int>(read_u32(is));
  tc.lambda_recon = read_f64(is);
  tc.seed = read_u64(is);
  tc.lr_plateau = static_cast<int>(read_u32(is));
  tc.lr_floor = read_f64(is);
  parser.train_config = tc;
  parser.corpus_seed = read_u64(is);

  parser.vocab = read_strings(is);
  parser.object_lexicon = read_strings(is);
  parser.destination_lexicon = read_strings(is);
  if (static_cast<int>(parser.vocab.size()) != sh.n_classes)
    throw FormatError("checkpoint vocabulary does not match class count");

  auto params = parser.model.params();
  std::uint32_t count = read_u32(is);
  if (count != params.size())
    throw FormatError("checkpoint tensor count mismatch");
  for (auto& p : params) {
    std::string name = read_string(is);
    if (name != p.name)
      throw FormatError("checkpoint tensor order mismatch at " + name);
    auto rows = static_cast<Eigen::Index>(read_u32(is));
    auto cols = static_cast<Eigen::Index>(read_u32(is));
    if (rows != p.value->rows() || cols != p.value->cols())
      throw FormatError("checkpoint tensor shape mismatch at " + name);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        (*p.value)(r, c) = static_cast<S>(read_f64(is));
  }
  return parser;
}

template void save_checkpoint<float>(const std::string&,
                                     InstructionParserT<float>&);
template void save_checkpoint<double>(const std::string&,
                                      InstructionParserT<double>&);
template InstructionParserT<float> load_checkpoint<float>(const std::string&);
template InstructionParserT<double> load_checkpoint<double>(
    const std::string&);

}  // namespace i2a
