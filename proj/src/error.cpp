#include "gdcan/error.hpp"

namespace gdcan {

std::string_view category_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Format: return "format";
    case ErrorKind::Corruption: return "corruption";
    case ErrorKind::NotMdf4: return "not-mdf4";
    case ErrorKind::UnsupportedLayout: return "unsupported-layout";
    case ErrorKind::DictMismatch: return "dict-mismatch";
    case ErrorKind::SpaceExhausted: return "space-exhausted";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace gdcan
