#include "actprompt/sim/expert.hpp"

#include <cmath>

namespace actprompt::sim {
namespace {

double wrap_signed(double radians) {
    double d = std::remainder(radians, kTwoPi);
    return d;
}

/// Dense trajectory builder: interpolated moves followed by dwells.
class TrajectoryBuilder {
public:
    TrajectoryBuilder(Action start, const Geometry& g) : current_(start), g_(g) { dwell(start.gripper); }

    void move_to(const Pose6& target, GripperState after) {
        const Pose6 from = current_.pose;
        const double dx = target.x() - from.x(), dy = target.y() - from.y(), dz = target.z() - from.z();
        const double distance = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (distance < g_.step_length) {
            // A shorter hop would leave the waypoint dwells adjacent, merging their keyframes.
            throw ExpertError("waypoints closer than one interpolation step");
        }
        const auto steps = static_cast<int>(std::ceil(distance / g_.step_length));
        const double dr = wrap_signed(target.roll() - from.roll());
        const double dp = wrap_signed(target.pitch() - from.pitch());
        const double dw = wrap_signed(target.yaw() - from.yaw());
        for (int i = 1; i <= steps; ++i) {
            const double s = static_cast<double>(i) / steps;
            Pose6 p = i == steps ? target
                                 : Pose6(from.x() + s * dx, from.y() + s * dy, from.z() + s * dz,
                                         from.roll() + s * dr, from.pitch() + s * dp, from.yaw() + s * dw);
            frames_.push_back({p, current_.gripper});
        }
        current_.pose = target;
        waypoints_.push_back({target, after});
        dwell(after);
    }

    std::vector<Action> frames() const { return frames_; }
    const std::vector<Action>& waypoints() const { return waypoints_; }

private:
    void dwell(GripperState after) {
        for (int i = 0; i < g_.dwell_steps; ++i) {
            if (i == 1) current_.gripper = after;
            frames_.push_back(current_);
        }
        current_.gripper = after;
    }

    Action current_;
    const Geometry& g_;
    std::vector<Action> frames_;
    std::vector<Action> waypoints_;
};

struct Plan {
    std::vector<std::pair<Pose6, GripperState>> waypoints;
};

// A free table spot for a destacked cube, as far from the stack as one
// approach spacing, preferring directions toward the workspace center.
Pose6 free_spot(const WorldState& world, const SimObject& bottom, const WorkspaceBounds& bounds, const Geometry& g,
                double yaw) {
    const double cx = (bounds.x().min + bounds.x().max) / 2.0;
    const double cy = (bounds.y().min + bounds.y().max) / 2.0;
    const double toward = std::atan2(cy - bottom.pose.y(), cx - bottom.pose.x());
    const double reach = 1.5 * g.min_separation;
    const double margin = g.cube_edge;
    for (int i = 0; i < 8; ++i) {
        const double a = toward + (i % 2 == 0 ? 1 : -1) * ((i + 1) / 2) * (kPi / 4.0);
        const double x = bottom.pose.x() + reach * std::cos(a);
        const double y = bottom.pose.y() + reach * std::sin(a);
        if (x < bounds.x().min + margin || x > bounds.x().max - margin || y < bounds.y().min + margin ||
            y > bounds.y().max - margin) {
            continue;
        }
        bool clear = true;
        for (const auto& o : world.objects) {
            if (o.name != bottom.name && std::hypot(o.pose.x() - x, o.pose.y() - y) < g.min_separation &&
                o.supported_by != bottom.name) {
                clear = false;
            }
        }
        if (clear) return Pose6(x, y, world.table_z + g.cube_edge / 2.0 + g.place_clearance, kPi, 0.0, yaw);
    }
    throw ExpertError("no free table spot next to the stack");
}

Plan plan_for(const TaskSpec& task, const WorldState& world, const Variation& v, const WorkspaceBounds& bounds,
              const Geometry& g) {
    const double approach_z = world.table_z + g.approach_height;
    const Pose6 home = home_pose(bounds, g);
    auto at = [](const Pose6& p, double z, double yaw) { return Pose6(p.x(), p.y(), z, kPi, 0.0, yaw); };
    constexpr auto kOpen = GripperState::Open;
    constexpr auto kClosed = GripperState::Closed;
    Plan plan;
    auto& w = plan.waypoints;
    switch (task.id) {
        case TaskId::StackCube: {
            const auto& top = world.object(v.targets[0]);
            const auto& bottom = world.object(v.targets[1]);
            const double yaw = top.pose.yaw();
            const double place_z = bottom.pose.z() + bottom.size / 2.0 + top.size / 2.0 + g.place_clearance;
            w.push_back({at(top.pose, approach_z, yaw), kOpen});
            w.push_back({at(top.pose, top.pose.z(), yaw), kClosed});
            w.push_back({at(top.pose, approach_z, yaw), kClosed});
            w.push_back({at(bottom.pose, approach_z, yaw), kClosed});
            w.push_back({at(bottom.pose, place_z, yaw), kOpen});
            w.push_back({at(bottom.pose, approach_z, yaw), kOpen});
            break;
        }
        case TaskId::DestackCube: {
            const auto& top = world.object(v.targets[0]);
            const auto& bottom = world.object(v.targets[1]);
            const double yaw = top.pose.yaw();
            const Pose6 spot = free_spot(world, bottom, bounds, g, yaw);
            w.push_back({at(top.pose, approach_z, yaw), kOpen});
            w.push_back({at(top.pose, top.pose.z(), yaw), kClosed});
            w.push_back({at(top.pose, approach_z, yaw), kClosed});
            w.push_back({at(spot, approach_z, yaw), kClosed});
            w.push_back({spot, kOpen});
            w.push_back({at(spot, approach_z, yaw), kOpen});
            break;
        }
        case TaskId::PushButton: {
            const auto& button = world.object(v.targets[0]);
            const double press_z = button.pose.z() + 0.4 * g.press_height;
            w.push_back({at(button.pose, approach_z, 0.0), kOpen});
            w.push_back({at(button.pose, world.table_z + 0.05, 0.0), kOpen});
            w.push_back({at(button.pose, press_z, 0.0), kOpen});
            w.push_back({at(button.pose, approach_z, 0.0), kOpen});
            break;
        }
        case TaskId::PushMultipleButtons: {
            for (const auto& name : v.targets) {
                const auto& button = world.object(name);
                w.push_back({at(button.pose, approach_z, 0.0), kOpen});
                w.push_back({at(button.pose, button.pose.z() + 0.4 * g.press_height, 0.0), kOpen});
            }
            const auto& last = world.object(v.targets.back());
            w.push_back({at(last.pose, approach_z, 0.0), kOpen});
            break;
        }
        case TaskId::SlideBlock: {
            const auto& block = world.object("block");
            const auto& target = world.object(v.targets[0]);
            const double yaw = block.pose.yaw();
            w.push_back({at(block.pose, approach_z, yaw), kOpen});
            w.push_back({at(block.pose, block.pose.z(), yaw), kClosed});
            w.push_back({at(target.pose, block.pose.z(), yaw), kOpen});
            w.push_back({at(target.pose, approach_z, yaw), kOpen});
            break;
        }
    }
    w.push_back({home, kOpen});
    return plan;
}

}  // namespace

ExpertRollout scripted_rollout(const TaskSpec& task, const WorldState& world, std::string_view instruction,
                               const WorkspaceBounds& bounds, const Geometry& g) {
    const Variation v = variation_from_instruction(task, instruction);
    const Plan plan = plan_for(task, world, v, bounds, g);

    TrajectoryBuilder builder(world.gripper, g);
    for (const auto& [pose, gripper] : plan.waypoints) builder.move_to(pose, gripper);
    const std::vector<Action> frames = builder.frames();

    WorldState sim = world;
    std::vector<std::vector<ObjectObservation>> trace;
    trace.reserve(frames.size());
    for (const auto& frame : frames) {
        sim = execute_action(sim, frame, bounds, g);
        if (sim.attached_count() > 1) throw ExpertError("expert attached two objects");
        trace.push_back(sim.observations());
    }
    if (!check_success(task, sim, v, g)) {
        throw ExpertError(std::string("scripted expert failed to solve ") + to_string(task.id));
    }

    Episode episode(std::string(instruction), world.observations(), synth_joint_velocities(frames), frames);
    return {std::move(episode), builder.waypoints(), std::move(trace), std::move(sim)};
}

Episode scripted_expert(const TaskSpec& task, const WorldState& world, std::string_view instruction,
                        const WorkspaceBounds& bounds, const Geometry& g) {
    return scripted_rollout(task, world, instruction, bounds, g).episode;
}

}  // namespace actprompt::sim
