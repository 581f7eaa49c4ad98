#include "i2a/actions.hpp"

#include <array>

namespace i2a {
namespace {

const std::array<std::string, kNumKinds> kKindNames = {
    "reach", "grasp", "lift",  "move", "tilt",    "give",
    "release", "place", "wipe", "stir", "retract", "pad",
};

const std::array<std::string, 7> kTaskNames = {
    "pick_place", "pick_pour", "stir",   "cleaning",
    "pick_give",  "pick_up",   "compositional",
};

using K = SubActionKind;

// Fixed label sequences per task. pick_place ends at release (the canonical
// pick-and-place plan); the other tasks finish with a retract to home.
const std::vector<K> kPickPlace = {K::reach, K::grasp, K::lift,
                                   K::move,  K::place, K::release};
const std::vector<K> kPickPour = {K::reach, K::grasp,   K::lift,   K::move,
                                  K::tilt,  K::release, K::retract};
const std::vector<K> kStir = {K::reach, K::grasp,   K::lift,   K::move,
                              K::stir,  K::release, K::retract};
const std::vector<K> kCleaning = {K::reach, K::grasp, K::wipe, K::release,
                                  K::retract};
const std::vector<K> kPickGive = {K::reach, K::grasp,   K::lift,   K::move,
                                  K::give,  K::release, K::retract};
const std::vector<K> kPickUp = {K::reach, K::grasp, K::lift};

}  // namespace

const std::string& kind_name(SubActionKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<SubActionKind> kind_from_name(const std::string& name) {
  for (int i = 0; i < kNumKinds; ++i) {
    if (kKindNames[i] == name) return static_cast<SubActionKind>(i);
  }
  return std::nullopt;
}

bool kind_takes_object(SubActionKind kind) {
  switch (kind) {
    case K::reach:
    case K::grasp:
    case K::lift:
    case K::move:
    case K::tilt:
    case K::give:
    case K::release:
    case K::place:
    case K::wipe:
    case K::stir:
      return true;
    default:
      return false;
  }
}

bool kind_takes_destination(SubActionKind kind) {
  switch (kind) {
    case K::move:
    case K::tilt:
    case K::give:
    case K::place:
      return true;
    default:
      return false;
  }
}

bool has_unresolved_slots(const ActionSequence& seq) {
  for (const SubAction& a : seq) {
    if (kind_takes_object(a.kind) && !a.object.has_value()) return true;
    if (kind_takes_destination(a.kind) && !a.destination.has_value())
      return true;
  }
  return false;
}

const std::string& task_name(TaskKind task) {
  return kTaskNames[static_cast<int>(task)];
}

std::optional<TaskKind> task_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) return static_cast<TaskKind>(i);
  }
  return std::nullopt;
}

const std::vector<SubActionKind>& canonical_pattern(TaskKind task) {
  switch (task) {
    case TaskKind::pick_place:
      return kPickPlace;
    case TaskKind::pick_pour:
      return kPickPour;
    case TaskKind::stir:
      return kStir;
    case TaskKind::cleaning:
      return kCleaning;
    case TaskKind::pick_give:
      return kPickGive;
    case TaskKind::pick_up:
      return kPickUp;
    default:
      return kPickPlace;  // compositional has no single pattern
  }
}

std::optional<std::vector<TaskKind>> match_segments(
    const std::vector<SubActionKind>& kinds) {
  std::vector<TaskKind> tasks;
  std::size_t pos = 0;
  while (pos < kinds.size()) {
    if (kinds[pos] != SubActionKind::reach) return std::nullopt;
    std::size_t end = pos + 1;
    while (end < kinds.size() && kinds[end] != SubActionKind::reach) ++end;
    bool matched = false;
    for (int t = 0; t < kNumSimpleTasks; ++t) {
      const auto& pat = canonical_pattern(static_cast<TaskKind>(t));
      if (pat.size() != end - pos) continue;
      bool eq = true;
      for (std::size_t i = 0; i < pat.size(); ++i) {
        if (pat[i] != kinds[pos + i]) {
          eq = false;
          break;
        }
      }
      if (eq) {
        tasks.push_back(static_cast<TaskKind>(t));
        matched = true;
        break;
      }
    }
    if (!matched) return std::nullopt;
    pos = end;
  }
  if (tasks.empty()) return std::nullopt;
  return tasks;
}

}  // namespace i2a
