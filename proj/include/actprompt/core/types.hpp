#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace actprompt {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps a finite angle into [0, 2π).
double normalize_angle(double radians);

/// 6-DoF pose in the world frame. Translation in meters, Euler angles in
/// radians normalized to [0, 2π) on construction.
class Pose6 {
public:
    Pose6() = default;
    Pose6(double x, double y, double z, double roll, double pitch, double yaw);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    double roll() const { return roll_; }
    double pitch() const { return pitch_; }
    double yaw() const { return yaw_; }

    std::array<double, 3> translation() const { return {x_, y_, z_}; }
    std::array<double, 3> rotation() const { return {roll_, pitch_, yaw_}; }
    std::array<double, 6> as_array() const { return {x_, y_, z_, roll_, pitch_, yaw_}; }

    Pose6 with_translation(double x, double y, double z) const;
    Pose6 with_yaw(double yaw) const;

    friend bool operator==(const Pose6&, const Pose6&) = default;

private:
    double x_ = 0.0, y_ = 0.0, z_ = 0.0;
    double roll_ = 0.0, pitch_ = 0.0, yaw_ = 0.0;
};

/// Binary encoding used everywhere (files and prompts): 1 = Open, 0 = Closed.
enum class GripperState { Open, Closed };

inline int gripper_bit(GripperState g) { return g == GripperState::Open ? 1 : 0; }
GripperState gripper_from_bit(int bit);

struct Action {
    Pose6 pose;
    GripperState gripper = GripperState::Open;

    friend bool operator==(const Action&, const Action&) = default;
};

class JointVelocities {
public:
    static constexpr std::size_t kDof = 7;

    JointVelocities() = default;
    explicit JointVelocities(std::span<const double> values);
    explicit JointVelocities(const std::array<double, kDof>& values);

    const std::array<double, kDof>& values() const { return values_; }
    double norm() const;

    friend bool operator==(const JointVelocities&, const JointVelocities&) = default;

private:
    std::array<double, kDof> values_{};
};

class ObjectObservation {
public:
    ObjectObservation(std::string name, Pose6 pose);

    const std::string& name() const { return name_; }
    const Pose6& pose() const { return pose_; }

    friend bool operator==(const ObjectObservation&, const ObjectObservation&) = default;

private:
    std::string name_;
    Pose6 pose_;
};

/// One demonstration. Actions are dense (one per timestep); keyframing is a
/// separate pass.
class Episode {
public:
    Episode(std::string instruction, std::vector<ObjectObservation> objects,
            std::vector<JointVelocities> velocities, std::vector<Action> actions);

    const std::string& instruction() const { return instruction_; }
    const std::vector<ObjectObservation>& objects() const { return objects_; }
    const std::vector<JointVelocities>& velocities() const { return velocities_; }
    const std::vector<Action>& actions() const { return actions_; }
    std::size_t length() const { return actions_.size(); }

    friend bool operator==(const Episode&, const Episode&) = default;

private:
    std::string instruction_;
    std::vector<ObjectObservation> objects_;
    std::vector<JointVelocities> velocities_;
    std::vector<Action> actions_;
};

/// Throws ValidationError unless every episode lists the same object names in
/// the same order.
void check_consistent_objects(std::span<const Episode> episodes);

struct AxisRange {
    double min = 0.0;
    double max = 1.0;

    double span() const { return max - min; }
    friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// Per-axis translation limits that define the bin spans.
class WorkspaceBounds {
public:
    WorkspaceBounds(AxisRange x, AxisRange y, AxisRange z);

    /// x, y in [-0.5, 0.5] m and z in [0, 0.5] m.
    static WorkspaceBounds desk_default();

    const AxisRange& x() const { return axes_[0]; }
    const AxisRange& y() const { return axes_[1]; }
    const AxisRange& z() const { return axes_[2]; }
    const AxisRange& axis(std::size_t i) const { return axes_.at(i); }

    /// Each axis widened by `fraction` of its span on both sides.
    WorkspaceBounds inflated(double fraction) const;
    bool contains(const Pose6& pose) const;

    friend bool operator==(const WorkspaceBounds&, const WorkspaceBounds&) = default;

private:
    std::array<AxisRange, 3> axes_;
};

}  // namespace actprompt
