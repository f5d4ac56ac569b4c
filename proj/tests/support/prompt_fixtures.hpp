#pragma once

// Hand-built episodes whose assembled prompts are pinned byte for byte by the
// files in tests/golden. Poses sit on bin centers so each bin below is exact.

#include <map>
#include <string>
#include <vector>

#include "actprompt/discretizer/discretizer.hpp"
#include "actprompt/promptgen/prompt.hpp"

namespace fixtures {

using Bins = std::array<int, 6>;

inline const actprompt::WorkspaceBounds kDesk = actprompt::WorkspaceBounds::desk_default();

inline actprompt::Pose6 at(const Bins& b) {
    return actprompt::dediscretize_pose(actprompt::DiscretePose::from_bins(b), kDesk);
}

inline std::vector<actprompt::ObjectObservation> objs(const std::vector<std::pair<std::string, Bins>>& list) {
    std::vector<actprompt::ObjectObservation> out;
    for (const auto& [name, bins] : list) out.emplace_back(name, at(bins));
    return out;
}

// Dense episode of length last keyframe + 1; frames off the keyframe map hold
// a neutral pose.
inline actprompt::Episode keyed_episode(std::string instruction, std::vector<actprompt::ObjectObservation> objects,
                                        const std::map<std::size_t, std::pair<Bins, int>>& keyed) {
    using namespace actprompt;
    const std::size_t T = keyed.rbegin()->first + 1;
    std::vector<Action> acts(T, Action{at({50, 50, 90, 36, 0, 0}), GripperState::Open});
    for (const auto& [t, a] : keyed) acts[t] = {at(a.first), gripper_from_bit(a.second)};
    return Episode(std::move(instruction), std::move(objects), std::vector<JointVelocities>(T), std::move(acts));
}

inline actprompt::KeyframeIndices keys_of(const std::map<std::size_t, std::pair<Bins, int>>& keyed) {
    std::vector<std::size_t> idx;
    for (const auto& kv : keyed) idx.push_back(kv.first);
    return {idx, idx.back() + 1};
}

inline actprompt::PromptBundle one_demo_prompt() {
    using namespace actprompt;
    const std::map<std::size_t, std::pair<Bins, int>> keyed = {{0, {{50, 50, 90, 36, 0, 0}, 1}},
                                                               {3, {{1, 2, 3, 4, 5, 6}, 0}}};
    const Episode e = keyed_episode("push", objs({{"b", {0, 0, 0, 0, 0, 0}}}), keyed);
    const IclExample ex = build_icl_example(e, keys_of(keyed), kDesk);
    const std::string test = format_input(objs({{"b", {10, 20, 30, 0, 0, 18}}}), "push", kDesk);
    return assemble_prompt(std::vector{ex}, test, default_system_prompts()[0]);
}

inline actprompt::PromptBundle three_demo_prompt() {
    using namespace actprompt;
    const std::string blue_on_yellow = "stack the blue cube on the yellow cube.";
    const std::string yellow_on_blue = "stack the yellow cube on the blue cube.";
    const Bins home = {50, 50, 90, 36, 0, 0};

    std::vector<IclExample> examples;
    auto add = [&](const std::string& instr, Bins blue, Bins yellow,
                   const std::map<std::size_t, std::pair<Bins, int>>& keyed) {
        const Episode e = keyed_episode(instr, objs({{"blue cube", blue}, {"yellow cube", yellow}}), keyed);
        examples.push_back(build_icl_example(e, keys_of(keyed), kDesk));
    };
    add(blue_on_yellow, {20, 30, 10, 0, 0, 9}, {60, 40, 10, 0, 0, 45},
        {{0, {home, 1}}, {2, {{20, 30, 10, 36, 0, 9}, 0}}, {4, {{60, 40, 20, 36, 0, 45}, 1}}});
    add(yellow_on_blue, {70, 20, 10, 0, 0, 0}, {25, 75, 10, 0, 0, 71},
        {{0, {home, 1}},
         {1, {{25, 75, 30, 36, 0, 71}, 1}},
         {3, {{25, 75, 10, 36, 0, 71}, 0}},
         {5, {{70, 20, 20, 36, 0, 0}, 1}}});
    add(blue_on_yellow, {50, 50, 10, 0, 0, 36}, {10, 90, 10, 0, 0, 18},
        {{0, {home, 1}}, {2, {{10, 90, 20, 36, 0, 18}, 1}}});

    const std::string test =
        format_input(objs({{"blue cube", {33, 66, 10, 0, 0, 12}}, {"yellow cube", {80, 15, 10, 0, 0, 60}}}),
                     blue_on_yellow, kDesk);
    return assemble_prompt(examples, test, default_system_prompts()[0]);
}

inline actprompt::PromptBundle closed_loop_prompt() {
    using namespace actprompt;
    const std::string instr = "slide the block onto the target square";
    const Bins target = {60, 40, 0, 0, 0, 0};
    const std::map<std::size_t, std::pair<Bins, int>> keyed = {{0, {{50, 50, 90, 36, 0, 0}, 1}},
                                                               {2, {{40, 40, 2, 36, 0, 0}, 0}},
                                                               {4, {{60, 40, 2, 36, 0, 0}, 1}},
                                                               {6, {{50, 50, 90, 36, 0, 0}, 1}}};
    const Episode e = keyed_episode(instr, objs({{"block", {40, 40, 2, 0, 0, 0}}, {"target square", target}}), keyed);
    ObjectPoseFn poses = [&](std::size_t t) -> std::optional<std::vector<ObjectObservation>> {
        const Bins block = t < 4 ? Bins{40, 40, 2, 0, 0, 0} : Bins{60, 40, 2, 0, 0, 0};
        return objs({{"block", block}, {"target square", target}});
    };
    const IclExample ex = build_closed_loop_example(e, keys_of(keyed), kDesk, poses);
    const std::string test =
        format_input(objs({{"block", {20, 70, 2, 0, 0, 9}}, {"target square", {75, 30, 0, 0, 0, 0}}}), instr, kDesk);
    return assemble_prompt(std::vector{ex}, test, default_system_prompts()[0]);
}

}  // namespace fixtures
