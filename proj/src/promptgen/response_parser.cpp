#include "actprompt/promptgen/response_parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>

#include "actprompt/promptgen/prompt.hpp"

namespace actprompt {
namespace {

constexpr std::size_t kActionArity = 7;
constexpr std::array<int, kActionArity> kBinLimits = {kTranslationBins, kTranslationBins, kTranslationBins,
                                                      kRotationBins,    kRotationBins,    kRotationBins,
                                                      2};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// "label: [a, b, c, d, e, f]" is an observation token, which responses may
// echo. A label in front of a seven-element bracket is just prose.
bool is_observation(std::string_view text, std::size_t open, std::size_t close) {
    std::size_t i = open;
    while (i > 0 && is_space(text[i - 1])) --i;
    if (i == 0 || text[i - 1] != ':') return false;
    const std::string_view content = text.substr(open + 1, close - open - 1);
    return std::count(content.begin(), content.end(), ',') == 5;
}

DiscreteAction parse_bracket(std::string_view text, std::size_t open, std::size_t close) {
    const std::string_view content = text.substr(open + 1, close - open - 1);
    std::array<int, kActionArity> values{};
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = content.find(',', start);
        const std::string_view token =
            trim(content.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (token.empty()) {
            if (comma == std::string_view::npos && count == 0) {
                throw ResponseParseError(ParseErrorKind::Arity, open, "empty bracket");
            }
            throw ResponseParseError(ParseErrorKind::Syntax, open, "empty element in bracket");
        }
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec == std::errc::result_out_of_range) {
            throw ResponseParseError(ParseErrorKind::Range, open, "integer overflow");
        }
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ResponseParseError(ParseErrorKind::Syntax, open, "non-integer element '" +
                                                                       std::string(token.substr(0, 32)) + "'");
        }
        if (count < kActionArity) {
            if (value < 0 || value >= kBinLimits[count]) {
                throw ResponseParseError(ParseErrorKind::Range, open,
                                         "element " + std::to_string(count) + " = " + std::to_string(value) +
                                             " outside [0, " + std::to_string(kBinLimits[count]) + ")");
            }
            values[count] = static_cast<int>(value);
        }
        ++count;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (count != kActionArity) {
        throw ResponseParseError(ParseErrorKind::Arity, open,
                                 "bracket holds " + std::to_string(count) + " integers, expected 7");
    }
    return {{values[0], values[1], values[2], values[3], values[4], values[5]}, values[6]};
}

}  // namespace

const char* to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::NoActions: return "no_actions";
        case ParseErrorKind::Range: return "range";
        case ParseErrorKind::Arity: return "arity";
        case ParseErrorKind::Syntax: return "syntax";
    }
    return "unknown";
}

ResponseParseError::ResponseParseError(ParseErrorKind kind, std::size_t position, const std::string& detail)
    : Error(std::string("response parse error (") + to_string(kind) + ") at byte " + std::to_string(position) +
            ": " + detail),
      kind_(kind),
      position_(position) {}

std::vector<DiscreteAction> parse_response(std::string_view text, ParseMode mode) {
    std::vector<DiscreteAction> actions;
    std::size_t open = std::string_view::npos;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '[') {
            open = i;
        } else if (c == ']' && open != std::string_view::npos) {
            if (!is_observation(text, open, i)) actions.push_back(parse_bracket(text, open, i));
            open = std::string_view::npos;
        }
    }
    if (actions.empty()) throw ResponseParseError(ParseErrorKind::NoActions, 0, "no action brackets found");

    if (mode == ParseMode::Strict) {
        const std::string_view body = trim(text);
        if (body != format_action_list(actions)) {
            throw ResponseParseError(ParseErrorKind::Syntax, static_cast<std::size_t>(body.data() - text.data()),
                                     "response deviates from the strict output grammar");
        }
    }
    return actions;
}

}  // namespace actprompt
