#include "actprompt/promptgen/prompt.hpp"

#include <charconv>

namespace actprompt {
namespace {

constexpr std::string_view kPairSeparator = " > ";
constexpr std::string_view kListSeparator = ", ";

template <std::size_t N>
std::string format_ints(const std::array<int, N>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < N; ++i) {
        if (i > 0) out += kListSeparator;
        out += std::to_string(values[i]);
    }
    out += ']';
    return out;
}

std::vector<DiscretePose> discretize_objects(std::span<const ObjectObservation> objects,
                                             const WorkspaceBounds& bounds) {
    std::vector<DiscretePose> poses;
    poses.reserve(objects.size());
    for (const auto& obj : objects) poses.push_back(discretize_pose(obj.pose(), bounds));
    return poses;
}

}  // namespace

std::string format_discrete_pose(const DiscretePose& pose) { return format_ints(pose.bins()); }

std::string format_observation(std::string_view name, const DiscretePose& pose) {
    if (name.empty()) throw ArgumentError("observation name must be non-empty");
    std::string out(name);
    out += ": ";
    out += format_discrete_pose(pose);
    return out;
}

std::string format_action(const DiscreteAction& action) {
    const auto b = action.pose.bins();
    return format_ints(std::array<int, 7>{b[0], b[1], b[2], b[3], b[4], b[5], action.gripper});
}

std::string format_action_list(std::span<const DiscreteAction> actions) {
    std::string out = "{";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i > 0) out += kListSeparator;
        out += format_action(actions[i]);
    }
    out += '}';
    return out;
}

std::string format_input(std::span<const ObjectObservation> objects, std::string_view instruction,
                         const WorkspaceBounds& bounds) {
    if (objects.empty()) throw PromptError("input needs at least one observation");
    if (instruction.empty()) throw PromptError("input needs a non-empty instruction");
    const auto poses = discretize_objects(objects, bounds);
    std::string out = "{";
    for (std::size_t i = 0; i < objects.size(); ++i) {
        out += format_observation(objects[i].name(), poses[i]);
        out += kListSeparator;
    }
    out += instruction;
    out += '}';
    return out;
}

IclExample build_icl_example(const Episode& episode, const KeyframeIndices& keyframes,
                             const WorkspaceBounds& bounds) {
    if (keyframes.size() < 2) throw PromptError("an example needs at least 2 keyframes");
    std::vector<DiscreteAction> actions;
    for (std::size_t k = 1; k < keyframes.size(); ++k) {
        const std::size_t t = keyframes[k];
        if (t >= episode.length()) throw PromptError("keyframe " + std::to_string(t) + " beyond episode end");
        actions.push_back(discretize_action(episode.actions()[t], bounds));
    }
    return {format_input(episode.objects(), episode.instruction(), bounds), format_action_list(actions)};
}

IclExample build_closed_loop_example(const Episode& episode, const KeyframeIndices& keyframes,
                                     const WorkspaceBounds& bounds, const ObjectPoseFn& object_poses) {
    if (keyframes.size() < 2) throw PromptError("an example needs at least 2 keyframes");
    if (!object_poses) throw PromptError("closed-loop example needs an object pose source");

    auto block_at = [&](std::size_t t) {
        auto objects = object_poses(t);
        if (!objects) throw PromptError("no object poses recorded for keyframe timestep " + std::to_string(t));
        const auto& roster = episode.objects();
        bool same = objects->size() == roster.size();
        for (std::size_t j = 0; same && j < roster.size(); ++j) same = (*objects)[j].name() == roster[j].name();
        if (!same) throw PromptError("object roster at timestep " + std::to_string(t) + " differs from episode");
        return format_input(*objects, episode.instruction(), bounds);
    };
    auto action_at = [&](std::size_t t) {
        if (t >= episode.length()) throw PromptError("keyframe " + std::to_string(t) + " beyond episode end");
        const DiscreteAction a = discretize_action(episode.actions()[t], bounds);
        return format_action_list(std::span<const DiscreteAction>(&a, 1));
    };

    IclExample example{block_at(keyframes[0]), action_at(keyframes[1])};
    for (std::size_t k = 2; k < keyframes.size(); ++k) {
        example.output += kListSeparator;
        example.output += block_at(keyframes[k - 1]);
        example.output += kPairSeparator;
        example.output += action_at(keyframes[k]);
    }
    return example;
}

PromptBundle assemble_prompt(std::span<const IclExample> examples, std::string_view test_input,
                             std::string_view system) {
    if (examples.empty()) throw PromptError("prompt needs at least one example");
    if (test_input.empty()) throw PromptError("test input must be non-empty");
    std::string body;
    for (const auto& ex : examples) {
        body += ex.input;
        body += kPairSeparator;
        body += ex.output;
        body += kListSeparator;
    }
    body += test_input;
    body += kPairSeparator;
    return {std::string(system), std::move(body)};
}

const std::vector<std::string>& default_system_prompts() {
    static const std::vector<std::string> prompts = {
        "You are a Franka Panda robot with a parallel gripper. We provide you with some demos in the format of "
        "observation>[action_1, action_2, ...]. Then you will receive a new observation and you need to output a "
        "sequence of actions that match the trends in the demos. Do not output anything else.",
        "You are an end-effector Franka Panda robot equipped with a parallel gripper. We will give you a series of "
        "demonstrations in the format observation>[action_1, action_2, ...]. Afterward, you will receive a new "
        "observation, and your task is to generate a sequence of actions that align with the patterns shown in the "
        "demos. Make sure to only output the actions and nothing else.",
        "You are a Franka Panda robot equipped with a parallel gripper. We will provide you with demonstrations in "
        "the format: observation>[action_1, action_2, ...]. Afterward, you will receive a new observation and must "
        "generate a sequence of actions that align with the patterns shown in the demos. Ensure that nothing else is "
        "included in your output.",
    };
    return prompts;
}

ParsedInput parse_input(std::string_view input) {
    if (input.size() < 2 || input.front() != '{' || input.back() != '}') {
        throw PromptError("input block must be enclosed in braces");
    }
    const std::string_view inner = input.substr(1, input.size() - 2);
    ParsedInput parsed;
    std::size_t pos = 0;
    while (true) {
        const std::size_t label_end = inner.find(": [", pos);
        if (label_end == std::string_view::npos) break;
        const std::size_t close = inner.find(']', label_end);
        if (close == std::string_view::npos) throw PromptError("unterminated observation in input block");
        std::array<int, 6> bins{};
        std::size_t cursor = label_end + 3;
        for (std::size_t i = 0; i < 6; ++i) {
            if (i > 0) {
                if (inner.substr(cursor, 2) != kListSeparator) throw PromptError("bad observation separator");
                cursor += 2;
            }
            const char* first = inner.data() + cursor;
            const char* last = inner.data() + close;
            auto [ptr, ec] = std::from_chars(first, last, bins[i]);
            if (ec != std::errc{}) throw PromptError("bad observation integer");
            cursor += static_cast<std::size_t>(ptr - first);
        }
        if (cursor != close) throw PromptError("observation must hold exactly 6 integers");
        const auto pose = DiscretePose::from_bins(bins);
        if (!pose.valid()) throw PromptError("observation bin out of range");
        parsed.observations.emplace_back(std::string(inner.substr(pos, label_end - pos)), pose);
        pos = close + 1;
        if (inner.substr(pos, 2) != kListSeparator) throw PromptError("observation must be followed by ', '");
        pos += 2;
    }
    if (parsed.observations.empty()) throw PromptError("input block has no observations");
    parsed.instruction = std::string(inner.substr(pos));
    if (parsed.instruction.empty()) throw PromptError("input block has no instruction");
    return parsed;
}

ParsedPrompt parse_prompt(std::string_view body) {
    ParsedPrompt parsed;
    std::size_t pos = 0;
    auto take_block = [&]() {
        if (pos >= body.size() || body[pos] != '{') {
            throw PromptError("expected '{' at offset " + std::to_string(pos));
        }
        const std::size_t close = body.find('}', pos);
        if (close == std::string_view::npos) throw PromptError("unterminated block at offset " + std::to_string(pos));
        std::string block(body.substr(pos, close - pos + 1));
        pos = close + 1;
        return block;
    };
    auto expect = [&](std::string_view token) {
        if (body.substr(pos, token.size()) != token) {
            throw PromptError("expected '" + std::string(token) + "' at offset " + std::to_string(pos));
        }
        pos += token.size();
    };
    while (true) {
        std::string input = take_block();
        expect(kPairSeparator);
        if (pos == body.size()) {
            parsed.test_input = std::move(input);
            break;
        }
        std::string output = take_block();
        expect(kListSeparator);
        parsed.examples.push_back({std::move(input), std::move(output)});
    }
    if (parsed.examples.empty()) throw PromptError("prompt has no examples");
    return parsed;
}

}  // namespace actprompt
