#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "actprompt/core/types.hpp"
#include "actprompt/sim/world.hpp"

namespace actprompt::sim {

enum class TaskId { StackCube, DestackCube, PushButton, PushMultipleButtons, SlideBlock };

const char* to_string(TaskId id);
TaskId task_from_string(std::string_view name);
const std::vector<TaskId>& all_tasks();

struct RosterEntry {
    std::string name;
    ObjectKind kind;
};

struct TaskSpec {
    TaskId id;
    std::string instruction_template;
    std::vector<RosterEntry> roster;
    std::string success_predicate;
};

const TaskSpec& task_spec(TaskId id);

/// Task-specific variation, expressed as object names:
///   StackCube / DestackCube: {top cube, bottom cube}
///   PushButton: {button}; PushMultipleButtons: {button, ...} in press order
///   SlideBlock: {target square}
struct Variation {
    std::vector<std::string> targets;

    friend bool operator==(const Variation&, const Variation&) = default;
};

/// Throws PredicateError when the variation does not fit the task.
void validate_variation(const TaskSpec& task, const Variation& variation);

std::string render_instruction(const TaskSpec& task, const Variation& variation);
Variation variation_from_instruction(const TaskSpec& task, std::string_view instruction);

/// Finite variation set used for round-robin demo stratification. Empty for
/// PushMultipleButtons, whose sequences are unbounded.
std::vector<Variation> enumerate_variations(const TaskSpec& task);

struct ResetResult {
    WorldState world;
    std::string instruction;
    Variation variation;
};

/// Deterministic in (task, seed). The layout stream depends only on the seed
/// and the roster, so PushButton and PushMultipleButtons share layouts.
ResetResult reset(const TaskSpec& task, std::uint64_t seed, const WorkspaceBounds& bounds,
                  const Geometry& geometry = {});

/// Same layout as reset(task, seed, ...) with the variation forced.
ResetResult reset(const TaskSpec& task, std::uint64_t seed, const WorkspaceBounds& bounds,
                  const Variation& variation, const Geometry& geometry = {});

bool check_success(const TaskSpec& task, const WorldState& world, const Variation& variation,
                   const Geometry& geometry = {});

}  // namespace actprompt::sim
