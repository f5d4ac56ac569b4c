#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actprompt/core/errors.hpp"
#include "actprompt/core/types.hpp"
#include "actprompt/discretizer/discretizer.hpp"
#include "actprompt/keyframe/keyframe.hpp"

namespace actprompt {

/// Raised when an example or a prompt cannot be built or split.
class PromptError : public Error {
public:
    using Error::Error;
};

/// One (input, output) demonstration pair.
struct IclExample {
    std::string input;
    std::string output;

    friend bool operator==(const IclExample&, const IclExample&) = default;
};

struct PromptBundle {
    std::string system;
    std::string body;
};

// Wire grammar, byte-exact:
//   observation  := NAME ": [" INT ", " INT ", " INT ", " INT ", " INT ", " INT "]"
//   action       := "[" INT ", " INT ", " INT ", " INT ", " INT ", " INT ", " BIT "]"
//   input        := "{" observation (", " observation)* ", " INSTRUCTION "}"
//   output       := "{" action (", " action)* "}"
//   body         := (input " > " output ", ")+ input " > "

std::string format_discrete_pose(const DiscretePose& pose);
std::string format_observation(std::string_view name, const DiscretePose& pose);
std::string format_action(const DiscreteAction& action);
std::string format_action_list(std::span<const DiscreteAction> actions);

/// Discretizes `objects` in order and renders the input block.
std::string format_input(std::span<const ObjectObservation> objects, std::string_view instruction,
                         const WorkspaceBounds& bounds);

/// Open-loop example: initial observations plus the actions at every keyframe
/// except the first.
IclExample build_icl_example(const Episode& episode, const KeyframeIndices& keyframes,
                             const WorkspaceBounds& bounds);

/// Object poses at a timestep, or nullopt when that timestep was not recorded.
using ObjectPoseFn = std::function<std::optional<std::vector<ObjectObservation>>(std::size_t)>;

/// Closed-loop example. For every keyframe k >= 1 the observation block taken
/// at keyframe k-1 is paired with the action at keyframe k. The first pair
/// forms the input/output of the example, later pairs are appended to the
/// output with the same " > " and ", " separators used between examples, so
/// that the assembled body reads x(t1) > {a(t2)}, x(t2) > {a(t3)}, ...
IclExample build_closed_loop_example(const Episode& episode, const KeyframeIndices& keyframes,
                                     const WorkspaceBounds& bounds, const ObjectPoseFn& object_poses);

PromptBundle assemble_prompt(std::span<const IclExample> examples, std::string_view test_input,
                             std::string_view system);

/// The original robot system prompt followed by its two paraphrases.
const std::vector<std::string>& default_system_prompts();

// Inverse helpers used to drive mocks from a rendered prompt.

struct ParsedInput {
    std::vector<std::pair<std::string, DiscretePose>> observations;
    std::string instruction;
};

struct ParsedPrompt {
    std::vector<IclExample> examples;
    std::string test_input;
};

ParsedInput parse_input(std::string_view input);
ParsedPrompt parse_prompt(std::string_view body);

}  // namespace actprompt
