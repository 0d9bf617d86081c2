#include "error.hpp"

namespace pctv {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Ok: return "ok";
        case ErrorCode::InvalidProfile: return "invalid-profile";
        case ErrorCode::Divergence: return "divergence";
        case ErrorCode::Parameter: return "parameter";
        case ErrorCode::Shape: return "shape";
        case ErrorCode::Index: return "index";
        case ErrorCode::Envelope: return "envelope";
        case ErrorCode::Marginal: return "marginal";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::Composition: return "composition";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace pctv
