#pragma once

#include <string_view>
#include <vector>

#include "actprompt/core/types.hpp"
#include "actprompt/sim/tasks.hpp"
#include "actprompt/sim/world.hpp"

namespace actprompt::sim {

struct ExpertRollout {
    Episode episode;
    /// Waypoints in execution order, each with the gripper state after its dwell.
    std::vector<Action> waypoints;
    /// Object observations after each dense timestep.
    std::vector<std::vector<ObjectObservation>> object_trace;
    WorldState final_world;
};

/// Waypoint policy: from the home pose, linear interpolation at no more than
/// `step_length` per step to each waypoint followed by a `dwell_steps` pause
/// during which any gripper toggle happens. Throws ExpertError when the dense
/// replay does not solve the task.
ExpertRollout scripted_rollout(const TaskSpec& task, const WorldState& world, std::string_view instruction,
                               const WorkspaceBounds& bounds, const Geometry& geometry = {});

Episode scripted_expert(const TaskSpec& task, const WorldState& world, std::string_view instruction,
                        const WorkspaceBounds& bounds, const Geometry& geometry = {});

}  // namespace actprompt::sim
