#pragma once

#include <array>

#include "actprompt/core/types.hpp"

namespace actprompt {

inline constexpr int kTranslationBins = 100;
inline constexpr int kRotationBins = 72;
inline constexpr double kRotationBinDegrees = 5.0;

/// Binned pose: translation bins in [0, 100), rotation bins in [0, 72).
struct DiscretePose {
    int tx = 0, ty = 0, tz = 0;
    int rr = 0, rp = 0, ry = 0;

    std::array<int, 6> bins() const { return {tx, ty, tz, rr, rp, ry}; }
    static DiscretePose from_bins(const std::array<int, 6>& b) { return {b[0], b[1], b[2], b[3], b[4], b[5]}; }
    bool valid() const;

    friend bool operator==(const DiscretePose&, const DiscretePose&) = default;
};

struct DiscreteAction {
    DiscretePose pose;
    int gripper = 1;  // 1 = Open, 0 = Closed

    bool valid() const { return pose.valid() && (gripper == 0 || gripper == 1); }

    friend bool operator==(const DiscreteAction&, const DiscreteAction&) = default;
};

/// Out-of-range values clamp to the boundary bin.
int discretize_translation(double value, double axis_min, double axis_max);
int discretize_rotation(double radians);

DiscretePose discretize_pose(const Pose6& pose, const WorkspaceBounds& bounds);
DiscreteAction discretize_action(const Action& action, const WorkspaceBounds& bounds);

/// Maps every bin to its center. Throws ValidationError on out-of-range bins.
Pose6 dediscretize_pose(const DiscretePose& pose, const WorkspaceBounds& bounds);
Action dediscretize_action(const DiscreteAction& action, const WorkspaceBounds& bounds);

}  // namespace actprompt
