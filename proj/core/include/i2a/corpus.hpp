#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "i2a/actions.hpp"

namespace i2a {

struct InstructionExample {
  std::string instruction;
  ActionSequence actions;
  TaskKind task_kind = TaskKind::pick_place;
  /// Hash of the surface phrasing with slots unfilled; split withholding
  /// groups examples by this id so test phrasings never appear in train/val.
  std::uint64_t template_id = 0;

  bool operator==(const InstructionExample&) const = default;
};

struct Corpus {
  std::vector<InstructionExample> examples;
  std::vector<std::string> vocab;  // ordered sub-action names, pad included
  std::vector<std::string> object_lexicon;
  std::vector<std::string> destination_lexicon;
  std::uint64_t seed = 0;
};

/// The full 12-entry vocabulary in class-index order.
std::vector<std::string> default_vocab();

/// Instruction templates, synonym sets and lexicons for the generator.
/// Template tokens: {object} {container} {location} {surface} {tool} are
/// slots filled from the lexicons; any other {word} picks from synonyms.
struct TemplateConfig {
  std::map<TaskKind, std::vector<std::string>> templates;
  std::map<std::string, std::vector<std::string>> synonyms;
  std::vector<std::string> objects;
  std::vector<std::string> tools;
  std::vector<std::string> containers;
  std::vector<std::string> locations;
  std::vector<std::string> surfaces;
  std::vector<std::string> joiners;
  double compositional_fraction = 0.25;
  /// Probability that the second clause of a compositional command reuses
  /// the first clause's object when both clauses take one.
  double shared_object_fraction = 0.3;
};

TemplateConfig default_template_config();

Corpus generate_corpus(const TemplateConfig& config, int n_examples,
                       std::uint64_t seed);

struct SplitRatios {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

/// Deterministic three-way partition. The test partition is assembled from
/// whole template groups withheld from train/val; train/val then split the
/// remaining examples by count targets derived from the ratios.
std::array<Corpus, 3> split_corpus(const Corpus& corpus,
                                   const SplitRatios& ratios,
                                   std::uint64_t seed);

struct OneHotSequence {
  Eigen::MatrixXd matrix;  // L x C, each row exactly one 1
  int length() const { return static_cast<int>(matrix.rows()); }
  int classes() const { return static_cast<int>(matrix.cols()); }
};

OneHotSequence encode_actions(const ActionSequence& actions, int length,
                              const std::vector<std::string>& vocab);

/// Lexicon matches found in an instruction, in token order. `positions`
/// parallel the labels and prevent one occurrence from filling two slots.
struct SlotCandidates {
  std::vector<std::string> objects;
  std::vector<std::size_t> object_positions;
  std::vector<std::string> destinations;
  std::vector<std::size_t> destination_positions;
};

SlotCandidates extract_slots(const std::string& instruction,
                             const std::vector<std::string>& object_lexicon,
                             const std::vector<std::string>& destination_lexicon);

/// Argmax decode (lowest class index wins ties), truncated at the first pad.
/// Object/destination slots are filled segment-by-segment from `slots`.
ActionSequence decode_actions(const Eigen::MatrixXd& probs,
                              const std::vector<std::string>& vocab,
                              const SlotCandidates& slots);

void save_corpus(const std::string& path, const Corpus& corpus);
Corpus load_corpus(const std::string& path);

}  // namespace i2a
