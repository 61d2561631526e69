#pragma once

#include <stdexcept>
#include <string>

namespace webqe {

enum class ErrorCode {
    MalformedUrl,
    RootUnreachable,
    UnparseableDocument,
    ChunkUnderflow,
    BackendUnavailable,
    ContextOverflow,
    SchemaFailure,
    DigestCollision,
    GenerationExhausted,
    UnmappableSlot,
    UnsatisfiableConstraint,
    UnboundSlot,
    UnknownElement,
    SessionLost,
    PortUnavailable,
    ConfigError,
    IoError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedUrl: return "MalformedUrl";
        case ErrorCode::RootUnreachable: return "RootUnreachable";
        case ErrorCode::UnparseableDocument: return "UnparseableDocument";
        case ErrorCode::ChunkUnderflow: return "ChunkUnderflow";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::ContextOverflow: return "ContextOverflow";
        case ErrorCode::SchemaFailure: return "SchemaFailure";
        case ErrorCode::DigestCollision: return "DigestCollision";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
        case ErrorCode::UnmappableSlot: return "UnmappableSlot";
        case ErrorCode::UnsatisfiableConstraint: return "UnsatisfiableConstraint";
        case ErrorCode::UnboundSlot: return "UnboundSlot";
        case ErrorCode::UnknownElement: return "UnknownElement";
        case ErrorCode::SessionLost: return "SessionLost";
        case ErrorCode::PortUnavailable: return "PortUnavailable";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace webqe
