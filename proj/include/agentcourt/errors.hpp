#pragma once

#include <stdexcept>
#include <string>

namespace agentcourt {

enum class ErrorKind {
    contract,            // precondition violation (missing role, index gap, ...)
    phase_mismatch,
    index_gap,
    premature_advance,
    duplicate_id,
    dimension_mismatch,
    empty_index,
    empty_text,
    empty_input,
    transport,
    auth,
    timeout,
    structured_parse,
    script_exhausted,
    extraction_failure,
    length_mismatch,
    io,
    hash_mismatch,
    missing_file,
    unsupported_version,
    lock_held,
    config,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Gateway failures carry the request tag so logs stay attributable.
class GatewayError : public Error {
public:
    GatewayError(ErrorKind kind, const std::string& tag, const std::string& message)
        : Error(kind, "[" + tag + "] " + message), tag_(tag) {}

    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

class StructuredParseError : public GatewayError {
public:
    StructuredParseError(const std::string& tag, const std::string& message, std::string raw_text)
        : GatewayError(ErrorKind::structured_parse, tag, message), raw_text_(std::move(raw_text)) {}

    const std::string& raw_text() const { return raw_text_; }

private:
    std::string raw_text_;
};

}  // namespace agentcourt
