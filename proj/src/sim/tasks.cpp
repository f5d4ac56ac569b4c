#include "actprompt/sim/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace actprompt::sim {
namespace {

const std::vector<std::string> kButtonColors = {"red", "yellow", "green", "blue"};

// Layout streams are shared by tasks with the same roster geometry.
enum class LayoutStream : std::uint64_t { SeparateCubes = 11, StackedCubes = 12, Buttons = 13, Slide = 14 };

std::string color_of(std::string_view name) { return std::string(name.substr(0, name.find(' '))); }

TaskSpec make_spec(TaskId id) {
    std::vector<RosterEntry> cubes = {{"blue cube", ObjectKind::Cube}, {"yellow cube", ObjectKind::Cube}};
    std::vector<RosterEntry> buttons;
    for (const auto& c : kButtonColors) buttons.push_back({c + " button", ObjectKind::Button});
    switch (id) {
        case TaskId::StackCube:
            return {id, "stack the <top> cube on the <bottom> cube.", cubes, "stacked"};
        case TaskId::DestackCube:
            return {id, "destack the <top> cube that is on the <bottom> cube.", cubes, "destacked"};
        case TaskId::PushButton:
            return {id, "push the <color> button", buttons, "pressed"};
        case TaskId::PushMultipleButtons:
            return {id, "push the <color> button, then push the <color> button, ...", buttons, "pressed_in_order"};
        case TaskId::SlideBlock:
            return {id,
                    "slide the block onto the target square",
                    {{"block", ObjectKind::Cube}, {"target square", ObjectKind::Target}},
                    "on_target"};
    }
    throw ArgumentError("unknown task id");
}

double object_size(ObjectKind kind, const Geometry& g) {
    switch (kind) {
        case ObjectKind::Cube: return g.cube_edge;
        case ObjectKind::Button: return g.button_radius;
        case ObjectKind::Target: return g.target_half_extent;
    }
    return 0.0;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Footprint {
    double x, y, yaw;
};

// Rejection-samples `count` positions in the central region with pairwise
// separation; the draw budget is shared across all objects.
std::vector<Footprint> place(std::size_t count, std::mt19937_64& rng, const WorkspaceBounds& bounds,
                             const Geometry& g) {
    const double fx = g.region_fraction * bounds.x().span() / 2.0;
    const double fy = g.region_fraction * bounds.y().span() / 2.0;
    const double cx = (bounds.x().min + bounds.x().max) / 2.0;
    const double cy = (bounds.y().min + bounds.y().max) / 2.0;
    std::vector<Footprint> placed;
    int draws = 0;
    while (placed.size() < count) {
        if (++draws > g.max_placement_draws) {
            throw PlacementError("object placement failed after " + std::to_string(g.max_placement_draws) +
                                 " draws");
        }
        Footprint f{uniform(rng, cx - fx, cx + fx), uniform(rng, cy - fy, cy + fy), uniform(rng, 0.0, kTwoPi)};
        const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Footprint& p) {
            return std::hypot(p.x - f.x, p.y - f.y) >= g.min_separation;
        });
        if (clear) placed.push_back(f);
    }
    return placed;
}

LayoutStream layout_stream(TaskId id) {
    switch (id) {
        case TaskId::StackCube: return LayoutStream::SeparateCubes;
        case TaskId::DestackCube: return LayoutStream::StackedCubes;
        case TaskId::PushButton:
        case TaskId::PushMultipleButtons: return LayoutStream::Buttons;
        case TaskId::SlideBlock: return LayoutStream::Slide;
    }
    return LayoutStream::SeparateCubes;
}

WorldState build_layout(const TaskSpec& task, std::uint64_t seed, const WorkspaceBounds& bounds,
                        const Geometry& g, const Variation& variation) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(layout_stream(task.id))));
    WorldState world;
    world.table_z = bounds.z().min;
    world.gripper = {home_pose(bounds, g), GripperState::Open};

    const bool stacked = task.id == TaskId::DestackCube;
    const auto spots = place(stacked ? 1 : task.roster.size(), rng, bounds, g);
    for (std::size_t i = 0; i < task.roster.size(); ++i) {
        const auto& entry = task.roster[i];
        const Footprint& f = spots[stacked ? 0 : i];
        SimObject obj;
        obj.name = entry.name;
        obj.kind = entry.kind;
        obj.size = object_size(entry.kind, g);
        const double z = world.table_z + (entry.kind == ObjectKind::Cube ? obj.size / 2.0 : 0.0);
        const double yaw = entry.kind == ObjectKind::Target ? 0.0 : f.yaw;
        obj.pose = Pose6(f.x, f.y, z, 0.0, 0.0, yaw);
        world.objects.push_back(std::move(obj));
    }
    if (stacked) {
        // Variation decides which cube sits on top; the top one gets its own yaw.
        SimObject& top = world.object(variation.targets.at(0));
        const SimObject& bottom = world.object(variation.targets.at(1));
        const double top_yaw = uniform(rng, 0.0, kTwoPi);
        top.pose = Pose6(bottom.pose.x(), bottom.pose.y(), bottom.pose.z() + g.cube_edge, 0.0, 0.0, top_yaw);
        top.supported_by = bottom.name;
    }
    return world;
}

Variation draw_variation(const TaskSpec& task, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 100 + static_cast<std::uint64_t>(task.id)));
    auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    switch (task.id) {
        case TaskId::StackCube:
        case TaskId::DestackCube:
        case TaskId::PushButton:
        case TaskId::SlideBlock: {
            const auto options = enumerate_variations(task);
            return options[pick(options.size())];
        }
        case TaskId::PushMultipleButtons: {
            const std::size_t count = 1 + pick(6);
            Variation v;
            std::size_t previous = kButtonColors.size();
            for (std::size_t i = 0; i < count; ++i) {
                std::size_t c = pick(kButtonColors.size() - (i == 0 ? 0 : 1));
                if (i > 0 && c >= previous) ++c;  // no immediate repeats
                v.targets.push_back(kButtonColors[c] + " button");
                previous = c;
            }
            return v;
        }
    }
    throw ArgumentError("unknown task id");
}

bool has_kind(const TaskSpec& task, const std::string& name, ObjectKind kind) {
    return std::any_of(task.roster.begin(), task.roster.end(),
                       [&](const RosterEntry& e) { return e.name == name && e.kind == kind; });
}

}  // namespace

const char* to_string(TaskId id) {
    switch (id) {
        case TaskId::StackCube: return "stack-cube";
        case TaskId::DestackCube: return "destack-cube";
        case TaskId::PushButton: return "push-button";
        case TaskId::PushMultipleButtons: return "push-multiple-buttons";
        case TaskId::SlideBlock: return "slide-block";
    }
    return "unknown";
}

TaskId task_from_string(std::string_view name) {
    for (TaskId id : all_tasks()) {
        if (name == to_string(id)) return id;
    }
    throw ArgumentError("unknown task '" + std::string(name) + "'");
}

const std::vector<TaskId>& all_tasks() {
    static const std::vector<TaskId> tasks = {TaskId::StackCube, TaskId::DestackCube, TaskId::PushButton,
                                              TaskId::PushMultipleButtons, TaskId::SlideBlock};
    return tasks;
}

const TaskSpec& task_spec(TaskId id) {
    static const std::vector<TaskSpec> specs = [] {
        std::vector<TaskSpec> s;
        for (TaskId t : all_tasks()) s.push_back(make_spec(t));
        return s;
    }();
    return specs.at(static_cast<std::size_t>(id));
}

void validate_variation(const TaskSpec& task, const Variation& v) {
    auto fail = [&](const std::string& why) {
        throw PredicateError(std::string("invalid variation for ") + to_string(task.id) + ": " + why);
    };
    switch (task.id) {
        case TaskId::StackCube:
        case TaskId::DestackCube:
            if (v.targets.size() != 2) fail("expected {top, bottom}");
            if (v.targets[0] == v.targets[1]) fail("top and bottom must differ");
            for (const auto& n : v.targets) {
                if (!has_kind(task, n, ObjectKind::Cube)) fail("unknown cube '" + n + "'");
            }
            return;
        case TaskId::PushButton:
            if (v.targets.size() != 1) fail("expected one button");
            if (!has_kind(task, v.targets[0], ObjectKind::Button)) fail("unknown button '" + v.targets[0] + "'");
            return;
        case TaskId::PushMultipleButtons:
            if (v.targets.empty() || v.targets.size() > 6) fail("expected 1 to 6 buttons");
            for (const auto& n : v.targets) {
                if (!has_kind(task, n, ObjectKind::Button)) fail("unknown button '" + n + "'");
            }
            return;
        case TaskId::SlideBlock:
            if (v.targets.size() != 1 || !has_kind(task, v.targets[0], ObjectKind::Target)) {
                fail("expected the target square");
            }
            return;
    }
}

std::string render_instruction(const TaskSpec& task, const Variation& v) {
    validate_variation(task, v);
    switch (task.id) {
        case TaskId::StackCube:
            return "stack the " + color_of(v.targets[0]) + " cube on the " + color_of(v.targets[1]) + " cube.";
        case TaskId::DestackCube:
            return "destack the " + color_of(v.targets[0]) + " cube that is on the " + color_of(v.targets[1]) +
                   " cube.";
        case TaskId::PushButton:
        case TaskId::PushMultipleButtons: {
            std::string out;
            for (std::size_t i = 0; i < v.targets.size(); ++i) {
                if (i > 0) out += ", then ";
                out += "push the " + color_of(v.targets[i]) + " button";
            }
            return out;
        }
        case TaskId::SlideBlock: return "slide the block onto the target square";
    }
    throw ArgumentError("unknown task id");
}

Variation variation_from_instruction(const TaskSpec& task, std::string_view instruction) {
    if (task.id == TaskId::PushMultipleButtons) {
        Variation v;
        std::size_t start = 0;
        while (true) {
            const auto sep = instruction.find(", then ", start);
            const auto segment = instruction.substr(start, sep == std::string_view::npos ? sep : sep - start);
            const auto single = variation_from_instruction(task_spec(TaskId::PushButton), segment);
            v.targets.push_back(single.targets.front());
            if (sep == std::string_view::npos) break;
            start = sep + 7;
        }
        validate_variation(task, v);
        return v;
    }
    for (const auto& v : enumerate_variations(task)) {
        if (render_instruction(task, v) == instruction) return v;
    }
    throw PredicateError(std::string("instruction '") + std::string(instruction) + "' does not match task " +
                         to_string(task.id));
}

std::vector<Variation> enumerate_variations(const TaskSpec& task) {
    switch (task.id) {
        case TaskId::StackCube:
        case TaskId::DestackCube:
            return {{{"blue cube", "yellow cube"}}, {{"yellow cube", "blue cube"}}};
        case TaskId::PushButton: {
            std::vector<Variation> out;
            for (const auto& c : kButtonColors) out.push_back({{c + " button"}});
            return out;
        }
        case TaskId::PushMultipleButtons: return {};
        case TaskId::SlideBlock: return {{{"target square"}}};
    }
    return {};
}

ResetResult reset(const TaskSpec& task, std::uint64_t seed, const WorkspaceBounds& bounds, const Geometry& g) {
    return reset(task, seed, bounds, draw_variation(task, seed), g);
}

ResetResult reset(const TaskSpec& task, std::uint64_t seed, const WorkspaceBounds& bounds, const Variation& v,
                  const Geometry& g) {
    validate_variation(task, v);
    ResetResult result{build_layout(task, seed, bounds, g, v), render_instruction(task, v), v};
    return result;
}

bool check_success(const TaskSpec& task, const WorldState& world, const Variation& v, const Geometry& g) {
    validate_variation(task, v);
    for (const auto& n : v.targets) {
        if (!world.has_object(n)) throw PredicateError("world has no object '" + n + "'");
    }
    switch (task.id) {
        case TaskId::StackCube: {
            const auto& top = world.object(v.targets[0]);
            const auto& bottom = world.object(v.targets[1]);
            if (world.attached_count() != 0) return false;
            const double xy = std::hypot(top.pose.x() - bottom.pose.x(), top.pose.y() - bottom.pose.y());
            const double gap = (top.pose.z() - top.size / 2.0) - (bottom.pose.z() + bottom.size / 2.0);
            return xy <= bottom.size / 2.0 && std::abs(gap) <= g.stack_tolerance;
        }
        case TaskId::DestackCube: {
            const auto& top = world.object(v.targets[0]);
            return !top.attached && top.pose.z() <= world.table_z + top.size / 2.0 + g.stack_tolerance;
        }
        case TaskId::PushButton: return world.object(v.targets[0]).pressed;
        case TaskId::PushMultipleButtons: {
            const bool all_pressed = std::all_of(v.targets.begin(), v.targets.end(),
                                                 [&](const std::string& n) { return world.object(n).pressed; });
            return all_pressed && world.press_log == v.targets;
        }
        case TaskId::SlideBlock: {
            const auto& target = world.object(v.targets[0]);
            const auto& block = world.object("block");
            return !block.attached && std::abs(block.pose.x() - target.pose.x()) <= target.size &&
                   std::abs(block.pose.y() - target.pose.y()) <= target.size;
        }
    }
    return false;
}

}  // namespace actprompt::sim
