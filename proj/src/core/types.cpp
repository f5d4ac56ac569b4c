#include "actprompt/core/types.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "actprompt/core/errors.hpp"

namespace actprompt {

double normalize_angle(double radians) {
    if (!std::isfinite(radians)) throw ArgumentError("angle must be finite");
    double wrapped = std::fmod(radians, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    // fmod of a tiny negative value plus 2π can round up to exactly 2π.
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

Pose6::Pose6(double x, double y, double z, double roll, double pitch, double yaw) : x_(x), y_(y), z_(z) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(roll) ||
        !std::isfinite(pitch) || !std::isfinite(yaw)) {
        throw ValidationError("Pose6 fields must be finite");
    }
    roll_ = normalize_angle(roll);
    pitch_ = normalize_angle(pitch);
    yaw_ = normalize_angle(yaw);
}

Pose6 Pose6::with_translation(double x, double y, double z) const { return {x, y, z, roll_, pitch_, yaw_}; }

Pose6 Pose6::with_yaw(double yaw) const { return {x_, y_, z_, roll_, pitch_, yaw}; }

GripperState gripper_from_bit(int bit) {
    if (bit == 1) return GripperState::Open;
    if (bit == 0) return GripperState::Closed;
    throw ValidationError("gripper bit must be 0 or 1, got " + std::to_string(bit));
}

JointVelocities::JointVelocities(std::span<const double> values) {
    if (values.size() != kDof) {
        throw ValidationError("JointVelocities length " + std::to_string(values.size()) + " ≠ 7");
    }
    for (std::size_t i = 0; i < kDof; ++i) {
        if (!std::isfinite(values[i])) throw ValidationError("JointVelocities must be finite");
        values_[i] = values[i];
    }
}

JointVelocities::JointVelocities(const std::array<double, kDof>& values)
    : JointVelocities(std::span<const double>(values)) {}

double JointVelocities::norm() const {
    return std::sqrt(std::inner_product(values_.begin(), values_.end(), values_.begin(), 0.0));
}

ObjectObservation::ObjectObservation(std::string name, Pose6 pose) : name_(std::move(name)), pose_(pose) {
    if (name_.empty()) throw ValidationError("object name must be non-empty");
}

Episode::Episode(std::string instruction, std::vector<ObjectObservation> objects,
                 std::vector<JointVelocities> velocities, std::vector<Action> actions)
    : instruction_(std::move(instruction)),
      objects_(std::move(objects)),
      velocities_(std::move(velocities)),
      actions_(std::move(actions)) {
    if (velocities_.size() != actions_.size()) {
        std::ostringstream msg;
        msg << "episode has " << velocities_.size() << " velocity samples but " << actions_.size() << " actions";
        throw ValidationError(msg.str());
    }
    if (actions_.size() < 2) {
        throw ValidationError("episode length " + std::to_string(actions_.size()) + " < 2");
    }
    if (objects_.empty()) throw ValidationError("episode has no objects");
    std::set<std::string> names;
    for (const auto& obj : objects_) {
        if (!names.insert(obj.name()).second) throw ValidationError("duplicate object name '" + obj.name() + "'");
    }
}

void check_consistent_objects(std::span<const Episode> episodes) {
    if (episodes.empty()) return;
    const auto& reference = episodes.front().objects();
    for (std::size_t i = 1; i < episodes.size(); ++i) {
        const auto& objs = episodes[i].objects();
        bool same = objs.size() == reference.size();
        for (std::size_t j = 0; same && j < objs.size(); ++j) same = objs[j].name() == reference[j].name();
        if (!same) {
            throw ValidationError("episode " + std::to_string(i) + " object roster differs from episode 0");
        }
    }
}

WorkspaceBounds::WorkspaceBounds(AxisRange x, AxisRange y, AxisRange z) : axes_{x, y, z} {
    static constexpr const char* kNames[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = axes_[i];
        if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.min < a.max)) {
            throw ValidationError(std::string("workspace axis ") + kNames[i] + " requires finite min < max");
        }
    }
}

WorkspaceBounds WorkspaceBounds::desk_default() { return {{-0.5, 0.5}, {-0.5, 0.5}, {0.0, 0.5}}; }

WorkspaceBounds WorkspaceBounds::inflated(double fraction) const {
    auto grow = [fraction](const AxisRange& a) {
        const double pad = fraction * a.span();
        return AxisRange{a.min - pad, a.max + pad};
    };
    return {grow(axes_[0]), grow(axes_[1]), grow(axes_[2])};
}

bool WorkspaceBounds::contains(const Pose6& pose) const {
    const auto t = pose.translation();
    for (std::size_t i = 0; i < 3; ++i) {
        if (t[i] < axes_[i].min || t[i] > axes_[i].max) return false;
    }
    return true;
}

}  // namespace actprompt
