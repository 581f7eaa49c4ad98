#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "i2a/corpus.hpp"
#include "i2a/embed.hpp"
#include "i2a/nn/attention.hpp"
#include "i2a/nn/layers.hpp"
#include "i2a/nn/lstm.hpp"

namespace i2a {

/// Layer widths of the instruction-to-action network. Defaults give the
/// production stack: 1024-d input, BiLSTM(256/dir) -> 8-head attention with
/// 256-wide heads -> BiLSTM(128/dir) + layer norm -> BiLSTM autoencoder
/// (64/dir bottleneck, 128/dir decoder) -> per-step softmax over 12 classes.
struct ModelShape {
  int embed_dim = 1024;
  int seq_len = 12;
  int n_classes = 12;
  int input_units = 256;
  int heads = 8;
  int head_dim = 256;
  int ff_units = 128;
  int encoder_units = 64;
  int decoder_units = 128;

  bool operator==(const ModelShape&) const = default;

  void validate() const {
    for (int v : {embed_dim, seq_len, n_classes, input_units, heads, head_dim,
                  ff_units, encoder_units, decoder_units})
      if (v <= 0) throw ConfigError("model shape entries must be positive");
    if (decoder_units != ff_units)
      throw ConfigError(
          "decoder_units must equal ff_units so the reconstruction matches "
          "the feature shape");
  }
};

template <class S>
struct BatchActivations {
  nn::Mat<S> input;  // (L*B) x d, tiled embeddings
  typename nn::BiLstm<S>::Cache lstm1_cache;
  nn::Mat<S> h1;
  typename nn::MultiHeadAttention<S>::Cache att_cache;
  nn::Mat<S> h_att;
  typename nn::BiLstm<S>::Cache ff_cache;
  nn::Mat<S> h_ff;
  typename nn::LayerNorm<S>::Cache norm_cache;
  nn::Mat<S> features;  // post-norm bottleneck features B
  typename nn::BiLstm<S>::Cache enc_cache;
  nn::Mat<S> latent;  // Z
  typename nn::BiLstm<S>::Cache dec_cache;
  nn::Mat<S> recon;  // reconstruction B-hat
  nn::Mat<S> logits;
  nn::Mat<S> probs;  // row-stochastic (L*B) x C
  int batch = 0;
};

struct LossStats {
  double total = 0.0;  // mean over batch of (ce + lambda * mse)
  double ce = 0.0;     // mean summed cross-entropy per example
  double mse = 0.0;    // mean reconstruction MSE per example
};

inline constexpr double kLogClamp = 1e-12;

template <class S>
class SequenceModelT {
 public:
  SequenceModelT() = default;

  explicit SequenceModelT(const ModelShape& shape)
      : shape_(shape),
        lstm1_(shape.embed_dim, shape.input_units),
        attention_(2 * shape.input_units, shape.heads, shape.head_dim),
        ff_(2 * shape.input_units, shape.ff_units),
        norm_(2 * shape.ff_units),
        encoder_(2 * shape.ff_units, shape.encoder_units),
        decoder_(2 * shape.encoder_units, shape.decoder_units),
        dense_(2 * shape.decoder_units, shape.n_classes) {
    shape.validate();
  }

  const ModelShape& shape() const { return shape_; }

  void init(std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0x11));
    lstm1_.init(rng);
    attention_.init(rng);
    ff_.init(rng);
    encoder_.init(rng);
    decoder_.init(rng);
    dense_.init(rng);
  }

  /// input: (L*B) x d tiled embeddings. Fills every intermediate activation;
  /// NaN anywhere is reported with the offending layer's name.
  void forward(const nn::Mat<S>& input, int batch,
               BatchActivations<S>& acts) const {
    const int L = shape_.seq_len;
    acts.batch = batch;
    acts.input = input;
    acts.h1 = lstm1_.forward(input, L, batch, true, acts.lstm1_cache);
    nn::check_finite(acts.h1, "input_bilstm");
    acts.h_att = attention_.forward(acts.h1, L, batch, acts.att_cache);
    nn::check_finite(acts.h_att, "attention");
    acts.h_ff = ff_.forward(acts.h_att, L, batch, false, acts.ff_cache);
    nn::check_finite(acts.h_ff, "ff_bilstm");
    acts.features = norm_.forward(acts.h_ff, acts.norm_cache);
    nn::check_finite(acts.features, "layer_norm");
    acts.latent = encoder_.forward(acts.features, L, batch, false,
                                   acts.enc_cache);
    nn::check_finite(acts.latent, "encoder_bilstm");
    acts.recon = decoder_.forward(acts.latent, L, batch, false,
                                  acts.dec_cache);
    nn::check_finite(acts.recon, "decoder_bilstm");
    acts.logits = dense_.forward(acts.recon);
    nn::check_finite(acts.logits, "dense");

    acts.probs.resize(acts.logits.rows(), acts.logits.cols());
    for (Eigen::Index r = 0; r < acts.logits.rows(); ++r) {
      S mx = acts.logits.row(r).maxCoeff();
      acts.probs.row(r) = (acts.logits.row(r).array() - mx).exp();
      acts.probs.row(r) /= acts.probs.row(r).sum();
    }
  }

  /// labels: (L*B) x C strict one-hot rows. Cross-entropy sums over the L
  /// steps; the reconstruction MSE averages over all L x features entries;
  /// both average over the batch.
  LossStats loss(const BatchActivations<S>& acts,
                 const nn::Mat<S>& labels, double lambda) const {
    const int L = shape_.seq_len;
    const int batch = acts.batch;
    const double mse_denom =
        static_cast<double>(L) * acts.features.cols();

    double ce_sum = 0.0;
    for (Eigen::Index r = 0; r < acts.probs.rows(); ++r) {
      Eigen::Index cls;
      labels.row(r).maxCoeff(&cls);
      double p = static_cast<double>(acts.probs(r, cls));
      ce_sum += -std::log(std::max(p, kLogClamp));
    }
    double mse_sum =
        static_cast<double>((acts.recon - acts.features).squaredNorm()) /
        mse_denom;

    LossStats stats;
    stats.ce = ce_sum / batch;
    stats.mse = mse_sum / batch;
    stats.total = stats.ce + lambda * stats.mse;
    return stats;
  }

  /// Accumulates gradients of the combined loss into the layer grads.
  LossStats backward(BatchActivations<S>& acts, const nn::Mat<S>& labels,
                     double lambda) {
    const int batch = acts.batch;
    LossStats stats = loss(acts, labels, lambda);

    // Softmax + clamped cross-entropy: rows whose true-class probability sits
    // under the clamp contribute zero gradient (the clamped log is constant).
    nn::Mat<S> dlogits(acts.probs.rows(), acts.probs.cols());
    const S inv_batch = S(1) / static_cast<S>(batch);
    for (Eigen::Index r = 0; r < acts.probs.rows(); ++r) {
      Eigen::Index cls;
      labels.row(r).maxCoeff(&cls);
      if (static_cast<double>(acts.probs(r, cls)) >= kLogClamp) {
        dlogits.row(r) = (acts.probs.row(r) - labels.row(r)) * inv_batch;
      } else {
        dlogits.row(r).setZero();
      }
    }

    const S mse_scale =
        S(2.0 * lambda /
          (static_cast<double>(shape_.seq_len) * acts.features.cols() * batch));
    nn::Mat<S> drecon = dense_.backward(dlogits, acts.recon);
    drecon += mse_scale * (acts.recon - acts.features);
    nn::Mat<S> dlatent = decoder_.backward(drecon, acts.dec_cache, true);
    nn::Mat<S> dfeatures = encoder_.backward(dlatent, acts.enc_cache, true);
    dfeatures += mse_scale * (acts.features - acts.recon);
    nn::Mat<S> dh_ff = norm_.backward(dfeatures, acts.norm_cache);
    nn::Mat<S> dh_att = ff_.backward(dh_ff, acts.ff_cache, true);
    nn::Mat<S> dh1 = attention_.backward(dh_att, acts.att_cache);
    lstm1_.backward(dh1, acts.lstm1_cache, false);
    return stats;
  }

  void zero_grad() {
    lstm1_.zero_grad();
    attention_.zero_grad();
    ff_.zero_grad();
    norm_.zero_grad();
    encoder_.zero_grad();
    decoder_.zero_grad();
    dense_.zero_grad();
  }

  /// Stable registry order; Adam state, checkpoints and snapshots index it.
  std::vector<nn::ParamRef<S>> params() {
    std::vector<nn::ParamRef<S>> out;
    lstm1_.collect_params(out, "input_bilstm");
    attention_.collect_params(out, "attention");
    ff_.collect_params(out, "ff_bilstm");
    norm_.collect_params(out, "layer_norm");
    encoder_.collect_params(out, "encoder_bilstm");
    decoder_.collect_params(out, "decoder_bilstm");
    dense_.collect_params(out, "dense");
    return out;
  }

  nn::BiLstm<S>& input_bilstm() { return lstm1_; }
  nn::MultiHeadAttention<S>& attention() { return attention_; }
  nn::BiLstm<S>& ff_bilstm() { return ff_; }
  nn::LayerNorm<S>& layer_norm() { return norm_; }
  nn::BiLstm<S>& encoder_bilstm() { return encoder_; }
  nn::BiLstm<S>& decoder_bilstm() { return decoder_; }
  nn::TimeDistributedDense<S>& dense() { return dense_; }

 private:
  ModelShape shape_;
  nn::BiLstm<S> lstm1_;
  nn::MultiHeadAttention<S> attention_;
  nn::BiLstm<S> ff_;
  nn::LayerNorm<S> norm_;
  nn::BiLstm<S> encoder_;
  nn::BiLstm<S> decoder_;
  nn::TimeDistributedDense<S> dense_;
};

struct TrainConfig {
  int batch_size = 64;
  double lr = 1e-4;
  int patience = 5;
  double min_delta = 1e-6;
  int max_epochs = 300;
  double lambda_recon = 0.1;
  std::uint64_t seed = 0;
  // Scheduler: halve the rate after lr_plateau epochs without validation
  // improvement, never below lr_floor.
  int lr_plateau = 3;
  double lr_floor = 1e-6;

  void validate() const {
    if (batch_size < 1 || patience < 1 || max_epochs < 1 || lr_plateau < 1)
      throw ConfigError("train config counts must be positive");
    if (!(lr > 0) || !(min_delta > 0) || lambda_recon < 0 || !(lr_floor > 0))
      throw ConfigError("train config rates must be positive");
  }
};

struct EpochStats {
  double train_loss = 0, train_ce = 0, train_mse = 0;
  double val_loss = 0, val_ce = 0, val_mse = 0;
  double lr = 0;
  double seconds = 0;
};

/// Instructions embedded once up front plus per-step class labels.
template <class S>
struct EncodedDataset {
  nn::Mat<S> embeddings;                  // n x d
  std::vector<std::vector<int>> classes;  // n entries of seq_len indices
  int seq_len = 0;
  int n_classes = 0;
  int size() const { return static_cast<int>(classes.size()); }
};

template <class S>
EncodedDataset<S> encode_dataset(const std::vector<InstructionExample>& examples,
                                 const EmbeddingProvider& embedder,
                                 const std::vector<std::string>& vocab,
                                 int seq_len) {
  EncodedDataset<S> ds;
  ds.seq_len = seq_len;
  ds.n_classes = static_cast<int>(vocab.size());
  ds.embeddings.resize(static_cast<Eigen::Index>(examples.size()),
                       embedder.dim());
  ds.classes.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    ds.embeddings.row(static_cast<Eigen::Index>(i)) =
        embedder.embed(examples[i].instruction).transpose().cast<S>();
    OneHotSequence onehot =
        encode_actions(examples[i].actions, seq_len, vocab);
    std::vector<int> cls(seq_len);
    for (int t = 0; t < seq_len; ++t) {
      Eigen::Index c;
      onehot.matrix.row(t).maxCoeff(&c);
      cls[t] = static_cast<int>(c);
    }
    ds.classes.push_back(std::move(cls));
  }
  return ds;
}

template <class S>
struct AdamOptimizer {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<nn::Mat<S>> m, v;

  explicit AdamOptimizer(const std::vector<nn::ParamRef<S>>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const auto& p : params) {
      m.push_back(nn::Mat<S>::Zero(p.value->rows(), p.value->cols()));
      v.push_back(nn::Mat<S>::Zero(p.value->rows(), p.value->cols()));
    }
  }

  void step(const std::vector<nn::ParamRef<S>>& params, double lr) {
    ++step_count;
    const S b1 = static_cast<S>(beta1);
    const S b2 = static_cast<S>(beta2);
    const S corr1 = static_cast<S>(1.0 - std::pow(beta1, step_count));
    const S corr2 = static_cast<S>(1.0 - std::pow(beta2, step_count));
    const S rate = static_cast<S>(lr);
    const S e = static_cast<S>(eps);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const nn::Mat<S>& g = *params[i].grad;
      m[i] = b1 * m[i] + (S(1) - b1) * g;
      v[i] = (b2 * v[i].array() + (S(1) - b2) * g.array().square()).matrix();
      params[i].value->array() -=
          rate * (m[i].array() / corr1) /
          ((v[i].array() / corr2).sqrt() + e);
    }
  }
};

template <class S>
struct TrainResult {
  SequenceModelT<S> model;
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_loss = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Tiled input block and one-hot labels for the examples at `idx`.
template <class S>
void assemble_batch(const EncodedDataset<S>& ds,
                    const std::vector<int>& idx, nn::Mat<S>& input,
                    nn::Mat<S>& labels) {
  const int batch = static_cast<int>(idx.size());
  const int L = ds.seq_len;
  const int d = static_cast<int>(ds.embeddings.cols());
  input.resize(Eigen::Index(L) * batch, d);
  labels.setZero(Eigen::Index(L) * batch, ds.n_classes);
  nn::Mat<S> block(batch, d);
  for (int e = 0; e < batch; ++e) block.row(e) = ds.embeddings.row(idx[e]);
  for (int t = 0; t < L; ++t) {
    input.middleRows(Eigen::Index(t) * batch, batch) = block;
    for (int e = 0; e < batch; ++e)
      labels(Eigen::Index(t) * batch + e, ds.classes[idx[e]][t]) = S(1);
  }
}

template <class S>
LossStats dataset_loss(SequenceModelT<S>& model, const EncodedDataset<S>& ds,
                       double lambda, int batch_size) {
  BatchActivations<S> acts;
  nn::Mat<S> input, labels;
  double total = 0, ce = 0, mse = 0;
  int done = 0;
  while (done < ds.size()) {
    int batch = std::min(batch_size, ds.size() - done);
    std::vector<int> idx(batch);
    for (int i = 0; i < batch; ++i) idx[i] = done + i;
    assemble_batch(ds, idx, input, labels);
    model.forward(input, batch, acts);
    LossStats s = model.loss(acts, labels, lambda);
    total += s.total * batch;
    ce += s.ce * batch;
    mse += s.mse * batch;
    done += batch;
  }
  LossStats out;
  out.total = total / ds.size();
  out.ce = ce / ds.size();
  out.mse = mse / ds.size();
  return out;
}

}  // namespace detail

/// Adam with seeded shuffling, plateau-halved learning rate and early
/// stopping on validation loss; returns the parameters of the best
/// validation epoch.
template <class S>
TrainResult<S> train_model(const ModelShape& shape,
                           const EncodedDataset<S>& train_set,
                           const EncodedDataset<S>& val_set,
                           const TrainConfig& cfg) {
  cfg.validate();
  shape.validate();
  if (train_set.size() == 0 || val_set.size() == 0)
    throw InputError("training needs non-empty train and validation sets");

  TrainResult<S> result;
  result.model = SequenceModelT<S>(shape);
  result.model.init(cfg.seed);
  auto params = result.model.params();
  AdamOptimizer<S> adam(params);

  std::vector<nn::Mat<S>> best_params;
  best_params.reserve(params.size());
  for (const auto& p : params) best_params.push_back(*p.value);

  double lr = cfg.lr;
  double best_val = std::numeric_limits<double>::infinity();
  double sched_best = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  int plateau = 0;

  std::vector<int> order(train_set.size());
  for (int i = 0; i < train_set.size(); ++i) order[i] = i;

  BatchActivations<S> acts;
  nn::Mat<S> input, labels;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    auto t_begin = std::chrono::steady_clock::now();
    SplitMix64 shuffle_rng(derive_seed(cfg.seed, 0x1000 + epoch));
    shuffle_rng.shuffle(order);

    double train_total = 0, train_ce = 0, train_mse = 0;
    int done = 0;
    while (done < train_set.size()) {
      int batch = std::min(cfg.batch_size, train_set.size() - done);
      std::vector<int> idx(order.begin() + done, order.begin() + done + batch);
      detail::assemble_batch(train_set, idx, input, labels);
      result.model.forward(input, batch, acts);
      result.model.zero_grad();
      LossStats s = result.model.backward(acts, labels, cfg.lambda_recon);
      adam.step(params, lr);
      train_total += s.total * batch;
      train_ce += s.ce * batch;
      train_mse += s.mse * batch;
      done += batch;
    }

    EpochStats ep;
    ep.train_loss = train_total / train_set.size();
    ep.train_ce = train_ce / train_set.size();
    ep.train_mse = train_mse / train_set.size();
    if (!std::isfinite(ep.train_loss))
      throw TrainingError("training diverged (non-finite loss) at epoch " +
                          std::to_string(epoch + 1));
    LossStats val = detail::dataset_loss(result.model, val_set,
                                         cfg.lambda_recon, cfg.batch_size);
    ep.val_loss = val.total;
    ep.val_ce = val.ce;
    ep.val_mse = val.mse;
    ep.lr = lr;
    ep.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t_begin)
                     .count();
    result.history.push_back(ep);

    if (val.total < best_val - cfg.min_delta) {
      best_val = val.total;
      result.best_epoch = epoch;
      result.best_val_loss = best_val;
      for (std::size_t i = 0; i < params.size(); ++i)
        best_params[i] = *params[i].value;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (since_improvement >= cfg.patience) break;

    if (val.total < sched_best - cfg.min_delta) {
      sched_best = val.total;
      plateau = 0;
    } else if (++plateau >= cfg.lr_plateau) {
      lr = std::max(lr / 2.0, cfg.lr_floor);
      plateau = 0;
    }
  }

  if (result.best_epoch < 0) {
    result.best_epoch = static_cast<int>(result.history.size()) - 1;
    result.best_val_loss = result.history.back().val_loss;
  } else {
    for (std::size_t i = 0; i < params.size(); ++i)
      *params[i].value = best_params[i];
  }
  return result;
}

struct Metrics {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double weighted_recall = 0.0;
  Eigen::MatrixXd confusion;  // true class rows x predicted class columns
};

/// Support-weighted scores from a count matrix (pad-class row excluded by
/// construction since only non-pad steps are scored).
Metrics metrics_from_confusion(const Eigen::MatrixXd& confusion);

struct Prediction {
  ActionSequence actions;
  double seconds = 0.0;
};

/// Trained network plus everything prediction needs: vocabulary, argument
/// lexicons and the training provenance carried into the checkpoint.
template <class S>
struct InstructionParserT {
  ModelShape shape;
  SequenceModelT<S> model;
  std::vector<std::string> vocab;
  std::vector<std::string> object_lexicon;
  std::vector<std::string> destination_lexicon;
  TrainConfig train_config;
  std::uint64_t corpus_seed = 0;

  Eigen::MatrixXd predict_probs(const std::string& instruction) const {
    HashedNgramEmbedder embedder(shape.embed_dim);
    Eigen::VectorXd e = embedder.embed(instruction);
    nn::Mat<S> input = tile_embedding(e, shape.seq_len).cast<S>();
    BatchActivations<S> acts;
    model.forward(input, 1, acts);
    return acts.probs.template cast<double>();
  }

  Prediction predict(const std::string& instruction) const {
    auto t_begin = std::chrono::steady_clock::now();
    Eigen::MatrixXd probs = predict_probs(instruction);
    SlotCandidates slots =
        extract_slots(instruction, object_lexicon, destination_lexicon);
    Prediction out;
    out.actions = decode_actions(probs, vocab, slots);
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t_begin)
                      .count();
    return out;
  }

  Metrics evaluate(const std::vector<InstructionExample>& test) const;
};

using InstructionParser = InstructionParserT<float>;

template <class S>
Metrics InstructionParserT<S>::evaluate(
    const std::vector<InstructionExample>& test) const {
  if (test.empty()) throw InputError("cannot evaluate on an empty set");
  const int C = shape.n_classes;
  const int L = shape.seq_len;
  HashedNgramEmbedder embedder(shape.embed_dim);
  EncodedDataset<S> ds = encode_dataset<S>(test, embedder, vocab, L);

  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(C, C);
  const int pad_class = C - 1;
  BatchActivations<S> acts;
  nn::Mat<S> input, labels;
  int done = 0;
  while (done < ds.size()) {
    int batch = std::min(64, ds.size() - done);
    std::vector<int> idx(batch);
    for (int i = 0; i < batch; ++i) idx[i] = done + i;
    detail::assemble_batch(ds, idx, input, labels);
    model.forward(input, batch, acts);
    for (int e = 0; e < batch; ++e) {
      for (int t = 0; t < L; ++t) {
        int truth = ds.classes[done + e][t];
        if (truth == pad_class) continue;
        Eigen::Index row = Eigen::Index(t) * batch + e;
        int pred = 0;
        for (int c = 1; c < C; ++c)
          if (acts.probs(row, c) > acts.probs(row, pred)) pred = c;
        confusion(truth, pred) += 1.0;
      }
    }
    done += batch;
  }
  return metrics_from_confusion(confusion);
}

template <class S>
struct ParserTrainResult {
  InstructionParserT<S> parser;
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_loss = 0.0;
};

/// Embeds both corpora with the hashed-n-gram provider and trains the stack.
template <class S>
ParserTrainResult<S> train_parser(const Corpus& train, const Corpus& val,
                                  const ModelShape& shape,
                                  const TrainConfig& cfg) {
  shape.validate();
  if (static_cast<int>(train.vocab.size()) != shape.n_classes)
    throw ConfigError("corpus vocabulary does not match model classes");
  HashedNgramEmbedder embedder(shape.embed_dim);
  EncodedDataset<S> train_ds =
      encode_dataset<S>(train.examples, embedder, train.vocab, shape.seq_len);
  EncodedDataset<S> val_ds =
      encode_dataset<S>(val.examples, embedder, train.vocab, shape.seq_len);
  TrainResult<S> trained = train_model(shape, train_ds, val_ds, cfg);

  ParserTrainResult<S> out;
  out.parser.shape = shape;
  out.parser.model = std::move(trained.model);
  out.parser.vocab = train.vocab;
  out.parser.object_lexicon = train.object_lexicon;
  out.parser.destination_lexicon = train.destination_lexicon;
  out.parser.train_config = cfg;
  out.parser.corpus_seed = train.seed;
  out.history = std::move(trained.history);
  out.best_epoch = trained.best_epoch;
  out.best_val_loss = trained.best_val_loss;
  return out;
}

// Checkpoint container: versioned binary with shape metadata, train config,
// corpus seed, vocabulary/lexicons and all tensors as little-endian f64.
template <class S>
void save_checkpoint(const std::string& path, InstructionParserT<S>& parser);
template <class S>
InstructionParserT<S> load_checkpoint(const std::string& path);

extern template void save_checkpoint<float>(const std::string&,
                                            InstructionParserT<float>&);
extern template void save_checkpoint<double>(const std::string&,
                                             InstructionParserT<double>&);
extern template InstructionParserT<float> load_checkpoint<float>(
    const std::string&);
extern template InstructionParserT<double> load_checkpoint<double>(
    const std::string&);

}  // namespace i2a
