#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sigmaridge {

enum class ErrorCode {
    InvalidArgument,
    InvalidInterval,
    InvalidBasis,
    DimensionMismatch,
    NonFiniteInput,
    NonFiniteState,
    AssumptionViolation,
    DegeneratePath,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. `index` carries the offending path, dimension or
/// repetition index when an error is propagated out of a loop.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(what), code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

    /// Re-raise with a context prefix and an index, keeping the code.
    [[noreturn]] void rethrow_with(const std::string& context, std::size_t index) const {
        throw Error(code_, context + ": " + what(), index);
    }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace sigmaridge
