#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actprompt/core/errors.hpp"
#include "actprompt/core/types.hpp"

namespace actprompt::sim {

class SimError : public Error {
public:
    using Error::Error;
};
class PlacementError : public SimError {
public:
    using SimError::SimError;
};
class ExecutionError : public SimError {
public:
    using SimError::SimError;
};
class ExpertError : public SimError {
public:
    using SimError::SimError;
};
class PredicateError : public SimError {
public:
    using SimError::SimError;
};

/// Interaction and layout constants. The interaction tolerances are wider than
/// the half-bin discretization error at the default 1 m span.
struct Geometry {
    double cube_edge = 0.04;
    double button_radius = 0.025;
    double target_half_extent = 0.05;
    double grasp_threshold = 0.02;
    double press_height = 0.01;
    double min_separation = 0.08;
    double approach_height = 0.15;   // above the table
    double place_clearance = 0.01;   // gap under a carried cube when placing
    double step_length = 0.02;       // expert interpolation, m per step
    int dwell_steps = 3;
    double bounds_margin = 0.10;     // executable poses may exceed bounds by this fraction of span
    double region_fraction = 0.6;    // central fraction of x/y used for object placement
    double home_height_fraction = 0.9;
    int max_placement_draws = 1000;
    double stack_tolerance = 0.01;   // StackCube z and DestackCube landing tolerance
};

enum class ObjectKind { Cube, Button, Target };

const char* to_string(ObjectKind kind);

/// `size` is the edge length of a cube, the radius of a button and the half
/// extent of a target square. Cube poses are centers; buttons and targets lie
/// flat on the table.
struct SimObject {
    std::string name;
    ObjectKind kind = ObjectKind::Cube;
    double size = 0.0;
    Pose6 pose;
    bool pressed = false;
    bool attached = false;
    std::optional<std::string> supported_by;

    friend bool operator==(const SimObject&, const SimObject&) = default;
};

struct WorldState {
    std::vector<SimObject> objects;
    Action gripper;
    std::size_t time = 0;
    double table_z = 0.0;
    /// Button names in the order their press events occurred.
    std::vector<std::string> press_log;
    /// Offset of the attached object from the gripper (translation, yaw).
    std::array<double, 3> attach_offset{};
    double attach_yaw_offset = 0.0;

    const SimObject& object(std::string_view name) const;
    SimObject& object(std::string_view name);
    bool has_object(std::string_view name) const;
    std::optional<std::size_t> attached_index() const;
    std::size_t attached_count() const;

    /// Ground-truth observations in roster order.
    std::vector<ObjectObservation> observations() const;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Home pose: workspace center in x/y, high above the table, tool pointing
/// down (roll = π).
Pose6 home_pose(const WorkspaceBounds& bounds, const Geometry& geometry = {});

/// Teleports the gripper to `action.pose` (dragging any attached cube), then
/// applies the gripper command. Closing within the grasp threshold of a cube
/// center attaches the nearest cube; opening releases it onto the highest
/// surface beneath. Entering a button's press region with nothing attached
/// logs a press.
/// Throws ExecutionError when the pose lies outside the bounds inflated by
/// `geometry.bounds_margin`.
WorldState execute_action(const WorldState& world, const Action& action, const WorkspaceBounds& bounds,
                          const Geometry& geometry = {});

/// ‖S_t‖ equals the end-effector translational speed between t-1 and t (zero
/// at t = 0), spread evenly over the 7 joints.
std::vector<JointVelocities> synth_joint_velocities(std::span<const Action> trajectory);

/// Adds zero-mean Gaussian noise with std k*sigma_t per translation axis and
/// k*sigma_r per rotation axis.
std::vector<ObjectObservation> add_pose_noise(std::span<const ObjectObservation> observations, double k,
                                              double sigma_t, double sigma_r, std::uint64_t seed);

/// Average pose-estimation error used as the unit noise level.
inline constexpr double kBaseSigmaTranslation = 0.0168;           // m
inline constexpr double kBaseSigmaRotation = 4.61 * kPi / 180.0;  // rad

/// splitmix64 finalizer; used to derive independent RNG streams from seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace actprompt::sim
