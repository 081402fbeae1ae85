#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdcan {

enum class ErrorKind {
    Parameter,         // invalid code parameters, length mismatches
    Format,            // malformed record, container or dictionary bytes
    Corruption,        // structurally valid input that fails an integrity check
    NotMdf4,           // missing identification block
    UnsupportedLayout, // MDF4 layout outside the single-group fixed-record subset
    DictMismatch,      // preset dictionary does not match the container
    SpaceExhausted,    // ID outside its encoding space
    Config,            // inconsistent run configuration
    Io,
};

std::string_view category_name(ErrorKind kind) noexcept;

/// Every library failure is an Error; what() carries a "category: " prefix.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(category_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace gdcan
