#include "actprompt/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace actprompt::sim {
namespace {

double xy_distance(const Pose6& a, const Pose6& b) { return std::hypot(a.x() - b.x(), a.y() - b.y()); }

double distance3(const Pose6& a, const Pose6& b) {
    return std::sqrt((a.x() - b.x()) * (a.x() - b.x()) + (a.y() - b.y()) * (a.y() - b.y()) +
                     (a.z() - b.z()) * (a.z() - b.z()));
}

bool in_press_region(const SimObject& button, const Pose6& gripper, const Geometry& g) {
    return xy_distance(button.pose, gripper) <= button.size && gripper.z() <= button.pose.z() + g.press_height;
}

void release(WorldState& world, std::size_t idx) {
    SimObject& cube = world.objects[idx];
    cube.attached = false;
    const double half = cube.size / 2.0;
    const double bottom = cube.pose.z() - half;
    double support_top = world.table_z;
    std::optional<std::string> support;
    for (std::size_t j = 0; j < world.objects.size(); ++j) {
        const SimObject& other = world.objects[j];
        if (j == idx || other.kind != ObjectKind::Cube || other.attached) continue;
        const double top = other.pose.z() + other.size / 2.0;
        const bool beneath = xy_distance(other.pose, cube.pose) < other.size / 2.0 && top <= bottom + half;
        if (beneath && top > support_top) {
            support_top = top;
            support = other.name;
        }
    }
    cube.pose = Pose6(cube.pose.x(), cube.pose.y(), support_top + half, 0.0, 0.0, cube.pose.yaw());
    cube.supported_by = support;
}

}  // namespace

const char* to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::Cube: return "cube";
        case ObjectKind::Button: return "button";
        case ObjectKind::Target: return "target";
    }
    return "unknown";
}

const SimObject& WorldState::object(std::string_view name) const {
    for (const auto& obj : objects) {
        if (obj.name == name) return obj;
    }
    throw SimError("no object named '" + std::string(name) + "'");
}

SimObject& WorldState::object(std::string_view name) {
    return const_cast<SimObject&>(std::as_const(*this).object(name));
}

bool WorldState::has_object(std::string_view name) const {
    return std::any_of(objects.begin(), objects.end(), [&](const SimObject& o) { return o.name == name; });
}

std::optional<std::size_t> WorldState::attached_index() const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (objects[i].attached) return i;
    }
    return std::nullopt;
}

std::size_t WorldState::attached_count() const {
    return static_cast<std::size_t>(
        std::count_if(objects.begin(), objects.end(), [](const SimObject& o) { return o.attached; }));
}

std::vector<ObjectObservation> WorldState::observations() const {
    std::vector<ObjectObservation> obs;
    obs.reserve(objects.size());
    for (const auto& o : objects) obs.emplace_back(o.name, o.pose);
    return obs;
}

Pose6 home_pose(const WorkspaceBounds& bounds, const Geometry& g) {
    const auto& z = bounds.z();
    return {(bounds.x().min + bounds.x().max) / 2.0, (bounds.y().min + bounds.y().max) / 2.0,
            z.min + g.home_height_fraction * z.span(), kPi, 0.0, 0.0};
}

WorldState execute_action(const WorldState& world, const Action& action, const WorkspaceBounds& bounds,
                          const Geometry& g) {
    if (!bounds.inflated(g.bounds_margin).contains(action.pose)) {
        throw ExecutionError("action pose outside the executable workspace");
    }
    WorldState next = world;
    const Pose6 from = world.gripper.pose;
    const Pose6& to = action.pose;
    next.gripper.pose = to;
    next.time = world.time + 1;

    if (auto idx = next.attached_index()) {
        SimObject& carried = next.objects[*idx];
        const auto& off = next.attach_offset;
        carried.pose = Pose6(to.x() + off[0], to.y() + off[1], to.z() + off[2], carried.pose.roll(),
                             carried.pose.pitch(), to.yaw() + next.attach_yaw_offset);
    }

    // Buttons are pressed by the bare gripper only.
    for (auto& obj : next.objects) {
        if (obj.kind != ObjectKind::Button || next.attached_index()) continue;
        if (in_press_region(obj, to, g) && !in_press_region(obj, from, g)) {
            obj.pressed = true;
            next.press_log.push_back(obj.name);
        }
    }

    const GripperState before = world.gripper.gripper;
    next.gripper.gripper = action.gripper;
    if (before == GripperState::Open && action.gripper == GripperState::Closed && !next.attached_index()) {
        std::optional<std::size_t> best;
        double best_distance = g.grasp_threshold;
        for (std::size_t i = 0; i < next.objects.size(); ++i) {
            const auto& obj = next.objects[i];
            if (obj.kind != ObjectKind::Cube) continue;
            const double d = distance3(obj.pose, to);
            if (d <= best_distance) {
                best_distance = d;
                best = i;
            }
        }
        if (best) {
            SimObject& cube = next.objects[*best];
            cube.attached = true;
            cube.supported_by.reset();
            next.attach_offset = {cube.pose.x() - to.x(), cube.pose.y() - to.y(), cube.pose.z() - to.z()};
            next.attach_yaw_offset = cube.pose.yaw() - to.yaw();
        }
    } else if (before == GripperState::Closed && action.gripper == GripperState::Open) {
        if (auto idx = next.attached_index()) release(next, *idx);
        next.attach_offset = {};
        next.attach_yaw_offset = 0.0;
    }
    return next;
}

std::vector<JointVelocities> synth_joint_velocities(std::span<const Action> trajectory) {
    std::vector<JointVelocities> out;
    out.reserve(trajectory.size());
    const double per_joint = 1.0 / std::sqrt(static_cast<double>(JointVelocities::kDof));
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
        double speed = 0.0;
        if (t > 0) speed = distance3(trajectory[t].pose, trajectory[t - 1].pose);
        std::array<double, JointVelocities::kDof> v;
        v.fill(speed * per_joint);
        out.emplace_back(v);
    }
    return out;
}

std::vector<ObjectObservation> add_pose_noise(std::span<const ObjectObservation> observations, double k,
                                              double sigma_t, double sigma_r, std::uint64_t seed) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ArgumentError("noise scale k must be >= 0");
    if (!(sigma_t >= 0.0) || !(sigma_r >= 0.0)) throw ArgumentError("noise sigmas must be >= 0");
    std::vector<ObjectObservation> out(observations.begin(), observations.end());
    if (k == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double st = k * sigma_t;
    const double sr = k * sigma_r;
    for (auto& obs : out) {
        const Pose6& p = obs.pose();
        const double dx = unit(rng) * st, dy = unit(rng) * st, dz = unit(rng) * st;
        const double dr = unit(rng) * sr, dp = unit(rng) * sr, dw = unit(rng) * sr;
        obs = ObjectObservation(obs.name(), Pose6(p.x() + dx, p.y() + dy, p.z() + dz, p.roll() + dr,
                                                  p.pitch() + dp, p.yaw() + dw));
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace actprompt::sim
