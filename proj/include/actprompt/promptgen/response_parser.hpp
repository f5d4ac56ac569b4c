#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "actprompt/core/errors.hpp"
#include "actprompt/discretizer/discretizer.hpp"

namespace actprompt {

enum class ParseErrorKind { NoActions, Range, Arity, Syntax };

const char* to_string(ParseErrorKind kind);

class ResponseParseError : public Error {
public:
    ResponseParseError(ParseErrorKind kind, std::size_t position, const std::string& detail);

    ParseErrorKind kind() const { return kind_; }
    /// Byte offset of the offending bracket (0 for NoActions).
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

enum class ParseMode {
    /// Extracts every innermost bracket from surrounding prose, fences and
    /// braces. Echoed observations ("name: [six ints]") are skipped.
    Lenient,
    /// Only the exact output grammar, modulo surrounding whitespace.
    Strict,
};

/// Total over arbitrary bytes: returns actions or throws ResponseParseError.
std::vector<DiscreteAction> parse_response(std::string_view text, ParseMode mode = ParseMode::Lenient);

}  // namespace actprompt
