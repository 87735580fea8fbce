#include "entrokit/errors.hpp"

namespace entrokit {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Validation: return "Validation";
        case ErrorKind::NonErgodic: return "NonErgodic";
        case ErrorKind::BadContext: return "BadContext";
        case ErrorKind::TailCapExceeded: return "TailCapExceeded";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::Corrupt: return "Corrupt";
        case ErrorKind::GuardExceeded: return "GuardExceeded";
        case ErrorKind::ZeroProbabilityBlock: return "ZeroProbabilityBlock";
        case ErrorKind::NoDecay: return "NoDecay";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::BadDelta: return "BadDelta";
        case ErrorKind::WindowTooShort: return "WindowTooShort";
        case ErrorKind::NotStable: return "NotStable";
        case ErrorKind::BelowThreshold: return "BelowThreshold";
        case ErrorKind::Empty: return "Empty";
    }
    return "Unknown";
}

}  // namespace entrokit
