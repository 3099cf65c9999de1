#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stunmix {

enum class ErrorKind {
    SimplexViolation,
    ShapeMismatch,
    NonFinite,
    EmptyTrainingSet,
    EmptyTestSet,
    EmptyDataset,
    NotDivisible,
    AllNoData,
    AlignmentMismatch,
    TooFewBlocks,
    InvalidConfig,
    InvalidArgument,
    Io,
    Format,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace stunmix
