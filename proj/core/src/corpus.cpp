#include "i2a/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "i2a/errors.hpp"
#include "i2a/hashing.hpp"
#include "i2a/rng.hpp"
#include "i2a/text.hpp"

namespace i2a {

namespace {

constexpr int kPaddedLength = 12;

bool is_slot_key(const std::string& key) {
  return key == "object" || key == "tool" || key == "container" ||
         key == "location" || key == "surface";
}

const std::vector<std::string>& lexicon_for_slot(const TemplateConfig& cfg,
                                                 const std::string& key) {
  if (key == "object") return cfg.objects;
  if (key == "tool") return cfg.tools;
  if (key == "container") return cfg.containers;
  if (key == "location") return cfg.locations;
  return cfg.surfaces;
}

struct Clause {
  std::string text;
  std::string surface;  // phrasing identity: synonyms resolved, slots kept
  std::map<std::string, std::string> slots;
};

// Draw order per clause is fixed (pattern index, then tokens left to right)
// so generation is a pure function of (config, seed).
Clause render_clause(const TemplateConfig& cfg, TaskKind task, SplitMix64& rng,
                     const std::map<std::string, std::string>& preset_slots) {
  auto it = cfg.templates.find(task);
  if (it == cfg.templates.end() || it->second.empty())
    throw ConfigError("no instruction templates for task " + task_name(task));
  const std::string& pattern = it->second[rng.index(it->second.size())];

  Clause clause;
  clause.slots = preset_slots;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    std::size_t open = pattern.find('{', pos);
    if (open == std::string::npos) {
      clause.text += pattern.substr(pos);
      clause.surface += pattern.substr(pos);
      break;
    }
    clause.text += pattern.substr(pos, open - pos);
    clause.surface += pattern.substr(pos, open - pos);
    std::size_t close = pattern.find('}', open);
    if (close == std::string::npos)
      throw ConfigError("unterminated slot in template: " + pattern);
    std::string key = pattern.substr(open + 1, close - open - 1);
    if (is_slot_key(key)) {
      auto slot_it = clause.slots.find(key);
      if (slot_it == clause.slots.end()) {
        const auto& lex = lexicon_for_slot(cfg, key);
        if (lex.empty())
          throw ConfigError("empty lexicon for slot {" + key + "}");
        slot_it = clause.slots.emplace(key, lex[rng.index(lex.size())]).first;
      }
      clause.text += slot_it->second;
      clause.surface += "{" + key + "}";
    } else {
      auto syn = cfg.synonyms.find(key);
      if (syn == cfg.synonyms.end() || syn->second.empty())
        throw ConfigError("unknown template token {" + key + "}");
      const std::string& word = syn->second[rng.index(syn->second.size())];
      clause.text += word;
      clause.surface += word;
    }
    pos = close + 1;
  }
  return clause;
}

const std::string& required_slot(const Clause& clause, const std::string& key,
                                 TaskKind task) {
  auto it = clause.slots.find(key);
  if (it == clause.slots.end())
    throw ConfigError("template for " + task_name(task) +
                      " is missing required slot {" + key + "}");
  return it->second;
}

ActionSequence build_actions(TaskKind task, const Clause& clause) {
  std::string object;
  std::string destination;
  switch (task) {
    case TaskKind::pick_place:
      object = required_slot(clause, "object", task);
      destination = required_slot(clause, "location", task);
      break;
    case TaskKind::pick_pour:
      object = required_slot(clause, "object", task);
      destination = required_slot(clause, "container", task);
      break;
    case TaskKind::stir:
      object = required_slot(clause, "tool", task);
      destination = required_slot(clause, "container", task);
      break;
    case TaskKind::cleaning:
      object = required_slot(clause, "tool", task);
      destination = required_slot(clause, "surface", task);
      break;
    case TaskKind::pick_give:
      object = required_slot(clause, "object", task);
      destination = "person";
      break;
    case TaskKind::pick_up:
      object = required_slot(clause, "object", task);
      break;
    default:
      throw ConfigError("compositional task has no single pattern");
  }

  ActionSequence actions;
  for (SubActionKind kind : canonical_pattern(task)) {
    SubAction a;
    a.kind = kind;
    if (kind == SubActionKind::wipe || kind == SubActionKind::stir) {
      a.object = destination;  // the surface/container being acted on
    } else if (kind_takes_object(kind)) {
      a.object = object;
      if (kind_takes_destination(kind)) a.destination = destination;
    }
    actions.push_back(std::move(a));
  }
  return actions;
}

std::vector<std::pair<TaskKind, TaskKind>> compositional_pairs() {
  std::vector<std::pair<TaskKind, TaskKind>> pairs;
  for (int a = 0; a < kNumSimpleTasks; ++a) {
    for (int b = 0; b < kNumSimpleTasks; ++b) {
      auto ta = static_cast<TaskKind>(a);
      auto tb = static_cast<TaskKind>(b);
      if (canonical_pattern(ta).size() + canonical_pattern(tb).size() <=
          kPaddedLength)
        pairs.emplace_back(ta, tb);
    }
  }
  return pairs;
}

bool task_uses_object_slot(TaskKind task) {
  return task == TaskKind::pick_place || task == TaskKind::pick_pour ||
         task == TaskKind::pick_give || task == TaskKind::pick_up;
}

InstructionExample make_simple(const TemplateConfig& cfg, TaskKind task,
                               SplitMix64& rng) {
  Clause clause = render_clause(cfg, task, rng, {});
  InstructionExample ex;
  ex.instruction = clause.text;
  ex.actions = build_actions(task, clause);
  ex.task_kind = task;
  ex.template_id = fnv1a64(clause.surface);
  return ex;
}

InstructionExample make_compositional(
    const TemplateConfig& cfg,
    const std::vector<std::pair<TaskKind, TaskKind>>& pairs, SplitMix64& rng) {
  if (cfg.joiners.empty()) throw ConfigError("no compositional joiners");
  const auto [t1, t2] = pairs[rng.index(pairs.size())];
  Clause c1 = render_clause(cfg, t1, rng, {});
  const std::string& joiner = cfg.joiners[rng.index(cfg.joiners.size())];
  bool share = rng.uniform01() < cfg.shared_object_fraction &&
               task_uses_object_slot(t1) && task_uses_object_slot(t2);
  std::map<std::string, std::string> preset;
  if (share) preset.emplace("object", c1.slots.at("object"));
  Clause c2 = render_clause(cfg, t2, rng, preset);

  InstructionExample ex;
  ex.instruction = c1.text + joiner + c2.text;
  ex.actions = build_actions(t1, c1);
  ActionSequence second = build_actions(t2, c2);
  ex.actions.insert(ex.actions.end(), second.begin(), second.end());
  ex.task_kind = TaskKind::compositional;
  ex.template_id = fnv1a64(c1.surface + "\x1f" + joiner + "\x1f" + c2.surface);
  return ex;
}

}  // namespace

std::vector<std::string> default_vocab() {
  std::vector<std::string> vocab;
  vocab.reserve(kNumKinds);
  for (int i = 0; i < kNumKinds; ++i)
    vocab.push_back(kind_name(static_cast<SubActionKind>(i)));
  return vocab;
}

TemplateConfig default_template_config() {
  TemplateConfig cfg;
  cfg.synonyms = {
      {"pick", {"pick up", "grab", "take", "get"}},
      {"place", {"place", "put", "set", "position"}},
      {"pour", {"pour", "empty", "tip"}},
      {"clean", {"wipe", "clean", "scrub"}},
      {"stir", {"stir", "mix"}},
      {"give", {"give", "hand", "bring", "pass"}},
      {"please", {"please", "kindly", "now"}},
  };
  cfg.templates[TaskKind::pick_place] = {
      "{pick} the {object} and {place} it on the {location}",
      "{pick} the {object} then {place} it on the {location}",
      "{place} the {object} on the {location}",
      "{please} {place} the {object} onto the {location}",
      "could you {place} the {object} on the {location}",
      "i want the {object} on the {location}",
      "on the {location} {place} the {object}",
      "{pick} the {object} and set it down on the {location}",
  };
  cfg.templates[TaskKind::pick_pour] = {
      "{pour} the {object} into the {container}",
      "{pick} the {object} and {pour} it into the {container}",
      "{pour} the contents of the {object} into the {container}",
      "into the {container} {pour} the {object}",
      "{pick} the {object} then {pour} it in the {container}",
      "{please} {pour} the {object} into the {container}",
      "fill the {container} from the {object}",
  };
  cfg.templates[TaskKind::stir] = {
      "{stir} the {container} with the {tool}",
      "use the {tool} to {stir} the {container}",
      "{pick} the {tool} and {stir} the {container}",
      "{stir} the contents of the {container} using the {tool}",
      "{please} {stir} the {container} with the {tool}",
  };
  cfg.templates[TaskKind::cleaning] = {
      "{clean} the {surface} with the {tool}",
      "use the {tool} to {clean} the {surface}",
      "{pick} the {tool} and {clean} the {surface}",
      "{clean} down the {surface} using the {tool}",
      "the {surface} needs cleaning so use the {tool}",
      "{please} {clean} the {surface} with the {tool}",
  };
  cfg.templates[TaskKind::pick_give] = {
      "{give} the {object} to the person",
      "{pick} the {object} and {give} it to the person",
      "{give} me the {object}",
      "{pick} the {object} and {give} it to me",
      "fetch the {object} for the person",
      "{please} {give} the {object} to the person",
  };
  cfg.templates[TaskKind::pick_up] = {
      "{pick} the {object}",        "{please} {pick} the {object}",
      "hold the {object}",          "{pick} the {object} for me",
      "i need you to {pick} the {object}",
  };
  cfg.objects = {"bottle", "cup",   "can",  "box",   "book",  "marker",
                 "ball",   "mug",   "glass", "plate", "apple", "banana"};
  cfg.tools = {"sponge", "cloth", "spoon", "brush"};
  cfg.containers = {"cup", "bowl", "mug", "glass", "jar", "pot"};
  cfg.locations = {"tray", "shelf", "bin", "mat", "rack", "table"};
  cfg.surfaces = {"table", "counter", "desk"};
  cfg.joiners = {" and then ", " then ", " and after that ", " next "};
  return cfg;
}

Corpus generate_corpus(const TemplateConfig& config, int n_examples,
                       std::uint64_t seed) {
  if (n_examples < 1) throw InputError("n_examples must be >= 1");
  for (int t = 0; t < kNumSimpleTasks; ++t) {
    auto it = config.templates.find(static_cast<TaskKind>(t));
    if (it == config.templates.end() || it->second.empty())
      throw ConfigError("no instruction templates for task " +
                        task_name(static_cast<TaskKind>(t)));
  }

  Corpus corpus;
  corpus.seed = seed;
  corpus.vocab = default_vocab();
  corpus.object_lexicon = config.objects;
  corpus.object_lexicon.insert(corpus.object_lexicon.end(),
                               config.tools.begin(), config.tools.end());
  if (corpus.object_lexicon.size() < 10)
    throw ConfigError("object lexicon must have at least 10 entries");
  for (const auto& group :
       {config.containers, config.locations, config.surfaces}) {
    for (const std::string& label : group) {
      if (std::find(corpus.destination_lexicon.begin(),
                    corpus.destination_lexicon.end(),
                    label) == corpus.destination_lexicon.end())
        corpus.destination_lexicon.push_back(label);
    }
  }
  corpus.destination_lexicon.push_back("person");

  const auto pairs = compositional_pairs();
  SplitMix64 rng(derive_seed(seed, 0x60));
  corpus.examples.reserve(n_examples);
  for (int i = 0; i < n_examples; ++i) {
    // The first seven examples cover every simple task plus one composition,
    // so any corpus of reasonable size spans the whole vocabulary.
    if (i < kNumSimpleTasks) {
      corpus.examples.push_back(
          make_simple(config, static_cast<TaskKind>(i), rng));
    } else if (i == kNumSimpleTasks) {
      corpus.examples.push_back(make_compositional(config, pairs, rng));
    } else if (rng.uniform01() < config.compositional_fraction) {
      corpus.examples.push_back(make_compositional(config, pairs, rng));
    } else {
      corpus.examples.push_back(make_simple(
          config, static_cast<TaskKind>(rng.index(kNumSimpleTasks)), rng));
    }
  }
  return corpus;
}

std::array<Corpus, 3> split_corpus(const Corpus& corpus,
                                   const SplitRatios& ratios,
                                   std::uint64_t seed) {
  if (corpus.examples.empty()) throw InputError("cannot split empty corpus");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0)
    throw ConfigError("split ratios must be non-negative");
  double sum = ratios.train + ratios.val + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1");

  const std::size_t n = corpus.examples.size();
  // Largest-remainder rounding of the three count targets.
  std::array<double, 3> raw = {n * ratios.train, n * ratios.val,
                               n * ratios.test};
  std::array<std::size_t, 3> target{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    target[i] = static_cast<std::size_t>(std::floor(raw[i]));
    assigned += target[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw[a] - std::floor(raw[a]) > raw[b] - std::floor(raw[b]);
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++target[order[k % 3]];

  // Withhold whole template groups for the test partition, cycling through
  // task kinds so test coverage stays balanced.
  std::map<std::uint64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i)
    groups[corpus.examples[i].template_id].push_back(i);

  SplitMix64 rng(derive_seed(seed, 0x51));
  std::array<std::vector<const std::vector<std::size_t>*>, 7> by_task;
  for (const auto& [id, members] : groups) {
    TaskKind task = corpus.examples[members.front()].task_kind;
    by_task[static_cast<int>(task)].push_back(&members);
  }
  for (auto& bucket : by_task) rng.shuffle(bucket);

  std::vector<bool> in_test(n, false);
  std::size_t remaining = target[2];
  std::array<std::size_t, 7> cursor{};
  bool progressed = true;
  while (remaining > 0 && progressed) {
    progressed = false;
    for (int t = 0; t < 7 && remaining > 0; ++t) {
      auto& bucket = by_task[t];
      std::size_t& cur = cursor[t];
      while (cur < bucket.size() && bucket[cur]->size() > remaining) ++cur;
      if (cur >= bucket.size()) continue;
      for (std::size_t idx : *bucket[cur]) in_test[idx] = true;
      remaining -= bucket[cur]->size();
      ++cur;
      progressed = true;
    }
  }

  std::vector<std::size_t> rest;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? test_idx : rest).push_back(i);

  rng.shuffle(rest);
  std::size_t n_train = std::min(target[0], rest.size());
  std::vector<std::size_t> train_idx(rest.begin(), rest.begin() + n_train);
  std::vector<std::size_t> val_idx(rest.begin() + n_train, rest.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  auto build = [&](const std::vector<std::size_t>& idx) {
    Corpus part;
    part.vocab = corpus.vocab;
    part.object_lexicon = corpus.object_lexicon;
    part.destination_lexicon = corpus.destination_lexicon;
    part.seed = corpus.seed;
    part.examples.reserve(idx.size());
    for (std::size_t i : idx) part.examples.push_back(corpus.examples[i]);
    return part;
  };
  std::array<Corpus, 3> out = {build(train_idx), build(val_idx),
                               build(test_idx)};

  if ((ratios.train > 0 && out[0].examples.empty()) ||
      (ratios.val > 0 && out[1].examples.empty()) ||
      (ratios.test > 0 && out[2].examples.empty()))
    throw ConfigError("corpus too small to populate all requested splits");
  return out;
}

OneHotSequence encode_actions(const ActionSequence& actions, int length,
                              const std::vector<std::string>& vocab) {
  if (static_cast<int>(actions.size()) > length)
    throw InputError("action sequence longer than padded length " +
                     std::to_string(length));
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < vocab.size(); ++i)
      if (vocab[i] == name) return static_cast<int>(i);
    throw InputError("kind not in vocabulary: " + name);
  };
  const int pad = index_of(kind_name(SubActionKind::pad));

  OneHotSequence seq;
  seq.matrix = Eigen::MatrixXd::Zero(length, static_cast<int>(vocab.size()));
  for (int t = 0; t < length; ++t) {
    int cls = t < static_cast<int>(actions.size())
                  ? index_of(kind_name(actions[t].kind))
                  : pad;
    seq.matrix(t, cls) = 1.0;
  }
  return seq;
}

SlotCandidates extract_slots(
    const std::string& instruction,
    const std::vector<std::string>& object_lexicon,
    const std::vector<std::string>& destination_lexicon) {
  std::vector<std::string> tokens = tokenize(instruction);

  // Longest-match, first-occurrence scan over both lexicons at once.
  struct Entry {
    std::vector<std::string> words;
    bool object = false;
    bool destination = false;
  };
  std::vector<Entry> entries;
  std::size_t max_words = 1;
  auto add = [&](const std::string& label, bool as_object) {
    std::vector<std::string> words = tokenize(label);
    if (words.empty()) return;
    max_words = std::max(max_words, words.size());
    for (Entry& e : entries) {
      if (e.words == words) {
        (as_object ? e.object : e.destination) = true;
        return;
      }
    }
    Entry e;
    e.words = std::move(words);
    (as_object ? e.object : e.destination) = true;
    entries.push_back(std::move(e));
  };
  for (const auto& label : object_lexicon) add(label, true);
  for (const auto& label : destination_lexicon) add(label, false);

  SlotCandidates slots;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const Entry* best = nullptr;
    for (const Entry& e : entries) {
      if (e.words.size() > tokens.size() - pos) continue;
      if (best && e.words.size() <= best->words.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < e.words.size(); ++k) {
        if (e.words[k] != tokens[pos + k]) {
          match = false;
          break;
        }
      }
      if (match) best = &e;
    }
    if (!best) {
      ++pos;
      continue;
    }
    std::string label = best->words[0];
    for (std::size_t k = 1; k < best->words.size(); ++k)
      label += " " + best->words[k];
    if (best->object) {
      slots.objects.push_back(label);
      slots.object_positions.push_back(pos);
    }
    if (best->destination) {
      slots.destinations.push_back(label);
      slots.destination_positions.push_back(pos);
    }
    pos += best->words.size();
  }
  return slots;
}

ActionSequence decode_actions(const Eigen::MatrixXd& probs,
                              const std::vector<std::string>& vocab,
                              const SlotCandidates& slots) {
  const int L = static_cast<int>(probs.rows());
  const int C = static_cast<int>(probs.cols());
  if (C != static_cast<int>(vocab.size()))
    throw InputError("probability columns do not match vocabulary size");
  for (int t = 0; t < L; ++t) {
    if (std::abs(probs.row(t).sum() - 1.0) > 1e-6)
      throw InputError("row " + std::to_string(t) +
                       " of decoded probabilities does not sum to 1");
  }

  std::vector<SubActionKind> kinds;
  for (int t = 0; t < L; ++t) {
    int best = 0;
    for (int c = 1; c < C; ++c)
      if (probs(t, c) > probs(t, best)) best = c;  // lowest index wins ties
    auto kind = kind_from_name(vocab[best]);
    if (!kind) throw InputError("vocabulary entry is not a known kind");
    if (*kind == SubActionKind::pad) break;  // nothing decodes after pad
    kinds.push_back(*kind);
  }

  // Fill argument slots segment by segment; a segment starts at each reach.
  ActionSequence seq;
  std::vector<bool> obj_used(slots.objects.size(), false);
  std::vector<bool> dest_used(slots.destinations.size(), false);
  std::vector<std::size_t> used_positions;

  std::size_t i = 0;
  while (i < kinds.size()) {
    std::size_t end = i + 1;
    while (end < kinds.size() && kinds[end] != SubActionKind::reach) ++end;

    bool needs_object = false;
    bool needs_destination = false;
    for (std::size_t k = i; k < end; ++k) {
      SubActionKind kind = kinds[k];
      if (kind == SubActionKind::wipe || kind == SubActionKind::stir)
        needs_destination = true;
      else if (kind_takes_object(kind))
        needs_object = true;
      if (kind_takes_destination(kind)) needs_destination = true;
    }

    std::optional<std::string> object;
    if (needs_object) {
      for (std::size_t k = 0; k < slots.objects.size(); ++k) {
        if (obj_used[k]) continue;
        obj_used[k] = true;
        object = slots.objects[k];
        used_positions.push_back(slots.object_positions[k]);
        break;
      }
    }
    std::optional<std::string> destination;
    if (needs_destination) {
      for (std::size_t k = 0; k < slots.destinations.size(); ++k) {
        if (dest_used[k]) continue;
        if (std::find(used_positions.begin(), used_positions.end(),
                      slots.destination_positions[k]) != used_positions.end())
          continue;  // this occurrence already fills an object slot
        dest_used[k] = true;
        destination = slots.destinations[k];
        used_positions.push_back(slots.destination_positions[k]);
        break;
      }
    }

    for (std::size_t k = i; k < end; ++k) {
      SubAction a;
      a.kind = kinds[k];
      if (a.kind == SubActionKind::wipe || a.kind == SubActionKind::stir) {
        a.object = destination;
      } else if (kind_takes_object(a.kind)) {
        a.object = object;
        if (kind_takes_destination(a.kind)) a.destination = destination;
      }
      seq.push_back(std::move(a));
    }
    i = end;
  }
  return seq;
}

namespace {

using nlohmann::json;

json action_to_json(const SubAction& a) {
  json j;
  j["kind"] = kind_name(a.kind);
  if (a.object) j["object"] = *a.object;
  if (a.destination) j["destination"] = *a.destination;
  return j;
}

SubAction action_from_json(const json& j) {
  SubAction a;
  auto kind = kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw FormatError("unknown sub-action kind in corpus file");
  a.kind = *kind;
  if (j.contains("object")) a.object = j["object"].get<std::string>();
  if (j.contains("destination"))
    a.destination = j["destination"].get<std::string>();
  return a;
}

}  // namespace

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  json header;
  header["format"] = "i2a-corpus";
  header["version"] = 1;
  header["seed"] = corpus.seed;
  header["vocab"] = corpus.vocab;
  header["objects"] = corpus.object_lexicon;
  header["destinations"] = corpus.destination_lexicon;
  os << header.dump() << "\n";
  for (const InstructionExample& ex : corpus.examples) {
    json j;
    j["instruction"] = ex.instruction;
    j["task"] = task_name(ex.task_kind);
    j["template_id"] = ex.template_id;
    json actions = json::array();
    for (const SubAction& a : ex.actions) actions.push_back(action_to_json(a));
    j["actions"] = std::move(actions);
    os << j.dump() << "\n";
  }
  if (!os) throw FormatError("write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open corpus file: " + path);
  std::string line;
  if (!std::getline(is, line)) throw FormatError("corpus file is empty");

  Corpus corpus;
  try {
    json header = json::parse(line);
    if (header.at("format") != "i2a-corpus" || header.at("version") != 1)
      throw FormatError("not an i2a-corpus v1 file: " + path);
    corpus.seed = header.at("seed").get<std::uint64_t>();
    corpus.vocab = header.at("vocab").get<std::vector<std::string>>();
    corpus.object_lexicon =
        header.at("objects").get<std::vector<std::string>>();
    corpus.destination_lexicon =
        header.at("destinations").get<std::vector<std::string>>();
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      InstructionExample ex;
      ex.instruction = j.at("instruction").get<std::string>();
      auto task = task_from_name(j.at("task").get<std::string>());
      if (!task) throw FormatError("unknown task kind in corpus file");
      ex.task_kind = *task;
      ex.template_id = j.at("template_id").get<std::uint64_t>();
      for (const json& a : j.at("actions"))
        ex.actions.push_back(action_from_json(a));
      if (ex.actions.empty())
        throw FormatError("corpus example with empty action list");
      corpus.examples.push_back(std::move(ex));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("corpus parse error: ") + e.what());
  }
  return corpus;
}

}  // namespace i2a
