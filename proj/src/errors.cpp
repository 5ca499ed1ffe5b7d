#include "agentcourt/errors.hpp"

namespace agentcourt {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::contract: return "contract";
        case ErrorKind::phase_mismatch: return "phase-mismatch";
        case ErrorKind::index_gap: return "index-gap";
        case ErrorKind::premature_advance: return "premature-advance";
        case ErrorKind::duplicate_id: return "duplicate-id";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::empty_index: return "empty-index";
        case ErrorKind::empty_text: return "empty-text";
        case ErrorKind::empty_input: return "empty-input";
        case ErrorKind::transport: return "transport";
        case ErrorKind::auth: return "auth";
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::structured_parse: return "structured-parse";
        case ErrorKind::script_exhausted: return "script-exhausted";
        case ErrorKind::extraction_failure: return "extraction-failure";
        case ErrorKind::length_mismatch: return "length-mismatch";
        case ErrorKind::io: return "io";
        case ErrorKind::hash_mismatch: return "hash-mismatch";
        case ErrorKind::missing_file: return "missing-file";
        case ErrorKind::unsupported_version: return "unsupported-version";
        case ErrorKind::lock_held: return "lock-held";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace agentcourt
