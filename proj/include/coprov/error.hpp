#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coprov {

enum class ErrorCategory {
    parse,
    empty_trace,
    validation,
    invariant,
    transition,
    pairing,
    infeasible,
    kernel,
    io,
};

std::string_view to_string(ErrorCategory category) noexcept;

// Every failure the library reports carries a category so the CLI can map it
// to an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace coprov
