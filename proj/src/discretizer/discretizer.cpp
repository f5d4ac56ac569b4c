#include "actprompt/discretizer/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actprompt/core/errors.hpp"

namespace actprompt {
namespace {

constexpr double kDegPerRad = 180.0 / kPi;

bool in_range(int bin, int count) { return bin >= 0 && bin < count; }

}  // namespace

bool DiscretePose::valid() const {
    return in_range(tx, kTranslationBins) && in_range(ty, kTranslationBins) && in_range(tz, kTranslationBins) &&
           in_range(rr, kRotationBins) && in_range(rp, kRotationBins) && in_range(ry, kRotationBins);
}

int discretize_translation(double value, double axis_min, double axis_max) {
    if (!std::isfinite(value)) throw ArgumentError("translation value must be finite");
    if (!(axis_min < axis_max)) throw ArgumentError("axis_min must be below axis_max");
    const double scaled = std::floor((value - axis_min) / (axis_max - axis_min) * kTranslationBins);
    return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(kTranslationBins - 1)));
}

int discretize_rotation(double radians) {
    if (!std::isfinite(radians)) throw ArgumentError("rotation value must be finite");
    const double degrees = normalize_angle(radians) * kDegPerRad;
    const double bin = std::floor(degrees / kRotationBinDegrees);
    // A value a hair below 2π can round to exactly 360 degrees.
    return static_cast<int>(std::clamp(bin, 0.0, static_cast<double>(kRotationBins - 1)));
}

DiscretePose discretize_pose(const Pose6& pose, const WorkspaceBounds& b) {
    return {
        discretize_translation(pose.x(), b.x().min, b.x().max),
        discretize_translation(pose.y(), b.y().min, b.y().max),
        discretize_translation(pose.z(), b.z().min, b.z().max),
        discretize_rotation(pose.roll()),
        discretize_rotation(pose.pitch()),
        discretize_rotation(pose.yaw()),
    };
}

DiscreteAction discretize_action(const Action& action, const WorkspaceBounds& bounds) {
    return {discretize_pose(action.pose, bounds), gripper_bit(action.gripper)};
}

Pose6 dediscretize_pose(const DiscretePose& pose, const WorkspaceBounds& b) {
    if (!pose.valid()) throw ValidationError("discrete pose has a bin outside its range");
    auto center = [](int bin, const AxisRange& axis) {
        return axis.min + (bin + 0.5) * axis.span() / kTranslationBins;
    };
    auto angle = [](int bin) { return (bin + 0.5) * kRotationBinDegrees / kDegPerRad; };
    return {center(pose.tx, b.x()), center(pose.ty, b.y()), center(pose.tz, b.z()),
            angle(pose.rr),         angle(pose.rp),         angle(pose.ry)};
}

Action dediscretize_action(const DiscreteAction& action, const WorkspaceBounds& bounds) {
    if (action.gripper != 0 && action.gripper != 1) {
        throw ValidationError("gripper bit must be 0 or 1, got " + std::to_string(action.gripper));
    }
    return {dediscretize_pose(action.pose, bounds), gripper_from_bit(action.gripper)};
}

}  // namespace actprompt
