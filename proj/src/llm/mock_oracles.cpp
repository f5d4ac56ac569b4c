#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <sstream>

#include "actprompt/llm/llm_bridge.hpp"
#include "actprompt/promptgen/prompt.hpp"
#include "actprompt/promptgen/response_parser.hpp"

namespace actprompt::llm {
namespace {

constexpr std::string_view kSegmentSeparator = ", then ";

bool is_color(std::string_view word) {
    return word == "red" || word == "yellow" || word == "green" || word == "blue";
}

std::vector<std::string_view> split_segments(std::string_view text) {
    std::vector<std::string_view> segments;
    std::size_t start = 0;
    while (true) {
        const auto hit = text.find(kSegmentSeparator, start);
        segments.push_back(text.substr(start, hit == std::string_view::npos ? std::string_view::npos : hit - start));
        if (hit == std::string_view::npos) break;
        start = hit + kSegmentSeparator.size();
    }
    return segments;
}

std::vector<std::size_t> candidates(std::span<const MockDemo> demos, std::string_view test_instruction) {
    std::vector<std::size_t> exact;
    const std::string wanted = normalize_instruction(test_instruction);
    for (std::size_t i = 0; i < demos.size(); ++i) {
        if (normalize_instruction(demos[i].instruction) == wanted) exact.push_back(i);
    }
    if (!exact.empty()) return exact;
    std::vector<std::size_t> templated;
    const std::string wanted_template = instruction_template(test_instruction);
    for (std::size_t i = 0; i < demos.size(); ++i) {
        if (instruction_template(demos[i].instruction) == wanted_template) templated.push_back(i);
    }
    return templated;
}

}  // namespace

const char* to_string(Provider provider) {
    switch (provider) {
        case Provider::Remote: return "remote";
        case Provider::MockNearest: return "mock-nearest";
        case Provider::MockCompositional: return "mock-compositional";
    }
    return "unknown";
}

Provider provider_from_string(std::string_view name) {
    if (name == "remote") return Provider::Remote;
    if (name == "mock-nearest") return Provider::MockNearest;
    if (name == "mock-compositional") return Provider::MockCompositional;
    throw ArgumentError("unknown provider '" + std::string(name) + "'");
}

void CompletionRequest::validate() const {
    if (system.empty()) throw ArgumentError("completion request needs a system text");
    if (user.empty()) throw ArgumentError("completion request needs a user text");
    if (model.empty()) throw ArgumentError("completion request needs a model identifier");
    if (max_tokens <= 0) throw ArgumentError("max_tokens must be positive");
    if (!(temperature >= 0.0)) throw ArgumentError("temperature must be >= 0");
}

std::string normalize_instruction(std::string_view instruction) {
    std::string out;
    bool pending_space = false;
    for (char c : instruction) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    while (!out.empty() && out.back() == '.') out.pop_back();
    return out;
}

std::string instruction_template(std::string_view instruction) {
    std::istringstream words(normalize_instruction(instruction));
    std::string word;
    std::string out;
    while (words >> word) {
        if (!out.empty()) out += ' ';
        out += is_color(word) ? "<color>" : word;
    }
    return out;
}

std::size_t nearest_demo_index(std::span<const MockDemo> demos, std::span<const int> test_observation,
                               std::string_view test_instruction) {
    if (demos.empty()) throw ArgumentError("nearest oracle needs at least one demo");
    for (const auto& demo : demos) {
        if (demo.observation.size() != test_observation.size()) {
            throw ArgumentError("demo observation length " + std::to_string(demo.observation.size()) +
                                " differs from test observation length " + std::to_string(test_observation.size()));
        }
    }
    const auto pool = candidates(demos, test_instruction);
    if (pool.empty()) {
        throw OracleError("no demonstration compatible with instruction '" + std::string(test_instruction) + "'");
    }
    std::size_t best = pool.front();
    std::int64_t best_distance = std::numeric_limits<std::int64_t>::max();
    for (std::size_t idx : pool) {
        std::int64_t distance = 0;
        const auto& obs = demos[idx].observation;
        for (std::size_t j = 0; j < obs.size(); ++j) {
            const std::int64_t d = static_cast<std::int64_t>(obs[j]) - test_observation[j];
            distance += d * d;
        }
        if (distance < best_distance) {
            best_distance = distance;
            best = idx;
        }
    }
    return best;
}

CompletionResult complete_mock_nearest(std::span<const MockDemo> demos, std::span<const int> test_observation,
                                       std::string_view test_instruction) {
    const std::size_t idx = nearest_demo_index(demos, test_observation, test_instruction);
    return {demos[idx].output, 0.0, Provider::MockNearest, 1};
}

CompletionResult complete_mock_compositional(std::span<const MockDemo> demos, std::span<const int> test_observation,
                                             std::string_view test_instruction) {
    const auto segments = split_segments(test_instruction);
    if (segments.size() == 1) {
        auto result = complete_mock_nearest(demos, test_observation, test_instruction);
        result.provider = Provider::MockCompositional;
        return result;
    }
    std::vector<DiscreteAction> actions;
    for (const auto segment : segments) {
        std::size_t idx = 0;
        try {
            idx = nearest_demo_index(demos, test_observation, segment);
        } catch (const OracleError&) {
            throw OracleError("no demonstration for instruction segment '" + std::string(segment) + "'");
        }
        std::vector<DiscreteAction> part;
        try {
            part = parse_response(demos[idx].output);
        } catch (const ResponseParseError& e) {
            throw OracleError("demonstration output for segment '" + std::string(segment) +
                              "' is not parseable: " + e.what());
        }
        actions.insert(actions.end(), part.begin(), part.end());
    }
    return {format_action_list(actions), 0.0, Provider::MockCompositional, 1};
}

}  // namespace actprompt::llm
