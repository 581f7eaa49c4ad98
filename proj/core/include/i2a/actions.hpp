#pragma once

#include <optional>
#include <string>
#include <vector>

namespace i2a {

/// Atomic manipulation primitives. The order fixes the class indices used by
/// one-hot encoding and the dense output layer; `pad` is always last.
enum class SubActionKind {
  reach = 0,
  grasp,
  lift,
  move,
  tilt,
  give,
  release,
  place,
  wipe,
  stir,
  retract,
  pad,
};

inline constexpr int kNumKinds = 12;

const std::string& kind_name(SubActionKind kind);
std::optional<SubActionKind> kind_from_name(const std::string& name);

/// True for kinds that act on a grasped/graspable object.
bool kind_takes_object(SubActionKind kind);
/// True for kinds whose second argument is a destination/recipient/container.
bool kind_takes_destination(SubActionKind kind);

struct SubAction {
  SubActionKind kind = SubActionKind::pad;
  std::optional<std::string> object;
  std::optional<std::string> destination;

  bool operator==(const SubAction& other) const = default;
};

using ActionSequence = std::vector<SubAction>;

/// True when some action is missing a required argument.
bool has_unresolved_slots(const ActionSequence& seq);

/// Task categories the corpus covers; `compositional` chains two of the
/// simple tasks in one instruction.
enum class TaskKind {
  pick_place = 0,
  pick_pour,
  stir,
  cleaning,
  pick_give,
  pick_up,
  compositional,
};

inline constexpr int kNumSimpleTasks = 6;

const std::string& task_name(TaskKind task);
std::optional<TaskKind> task_from_name(const std::string& name);

/// Canonical sub-action kinds for one simple task, in execution order.
const std::vector<SubActionKind>& canonical_pattern(TaskKind task);

/// Splits a kind sequence into task segments (each starting at `reach`) and
/// returns the matching simple-task kinds, or nullopt if any segment does not
/// match a canonical pattern.
std::optional<std::vector<TaskKind>> match_segments(
    const std::vector<SubActionKind>& kinds);

}  // namespace i2a
