#pragma once

#include <stdexcept>
#include <string>

namespace gepbench {

enum class ErrorKind {
    invalid_argument,   // bad spec/config values, caught before any work
    dim_mismatch,
    label_out_of_range,
    nan_loss,
    infeasible_spec,
    class_missing,
    split_granularity,
    length_mismatch,
    empty_input,
    bad_magic,
    bad_dtype,
    truncated,
    checksum_mismatch,
    shape_mismatch,
    missing_file,
    schema,
    io,
};

// Single exception type carrying a machine-checkable kind plus a human message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Errors raised while validating inputs (specs, configs, file schemas)
    // map to CLI exit code 1; everything else is a runtime failure (exit 2).
    bool is_validation() const noexcept {
        switch (kind_) {
            case ErrorKind::invalid_argument:
            case ErrorKind::schema:
            case ErrorKind::missing_file:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace gepbench
