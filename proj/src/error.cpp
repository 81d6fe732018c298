#include "coprov/error.hpp"

namespace coprov {

std::string_view to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::parse: return "parse error";
        case ErrorCategory::empty_trace: return "empty trace";
        case ErrorCategory::validation: return "validation error";
        case ErrorCategory::invariant: return "invariant error";
        case ErrorCategory::transition: return "transition error";
        case ErrorCategory::pairing: return "pairing error";
        case ErrorCategory::infeasible: return "infeasible scenario";
        case ErrorCategory::kernel: return "kernel error";
        case ErrorCategory::io: return "io error";
    }
    return "error";
}

}  // namespace coprov
