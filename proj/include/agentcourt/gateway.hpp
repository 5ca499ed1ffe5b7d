#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/errors.hpp"

namespace agentcourt {

enum class MsgRole { system, user, assistant };

const char* msg_role_name(MsgRole role);

struct ChatMessage {
    MsgRole role = MsgRole::user;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    int max_tokens = 1024;
    std::string tag;  // free-form label for logging and script matching

    void validate() const;  // at least one message; first is system or user
    std::string joined_content() const;
};

struct TokenUsage {
    int64_t prompt_tokens = 0;
    int64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string content;
    std::optional<TokenUsage> usage;
    std::string backend_id;
};

enum class FieldKind { boolean, string, string_list, object_list, int_in_range };

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::string;
    bool required = true;
    bool non_empty = false;  // string kind: reject ""
    int min_int = std::numeric_limits<int>::min();
    int max_int = std::numeric_limits<int>::max();
    size_t min_items = 0;
    size_t max_items = std::numeric_limits<size_t>::max();
};

struct StructureSpec {
    std::vector<FieldSpec> fields;

    void validate() const;  // at least one required field
    std::string describe() const;
};

// Locates the first balanced JSON object in free-form text (code fences and
// surrounding prose tolerated). Returns nullopt when none parses.
std::optional<nlohmann::json> extract_first_json_object(const std::string& text);

// Empty string when the object satisfies the spec, else a description of the
// first violation.
std::string check_structure(const nlohmann::json& object, const StructureSpec& spec);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

struct ScriptEntry {
    std::string match;  // "" matches anything; else exact tag, tag substring, or message substring
    std::string reply;
};

// Deterministic replay double. Each call consumes the first unconsumed entry
// whose match applies; consumption order is serialized per instance.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> script);

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "scripted"; }

    size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<ScriptEntry> script_;
    std::vector<bool> consumed_;
};

std::vector<ScriptEntry> load_script_file(const std::string& path);

struct HttpBackendConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string model;
    std::string api_key;
    int timeout_ms = 30000;
};

std::shared_ptr<ChatBackend> make_http_backend(const HttpBackendConfig& config);

struct RetryPolicy {
    int max_retries = 2;       // retries after the first attempt
    int backoff_base_ms = 250; // doubled per retry
};

struct ExchangeRecord {
    std::string tag;
    double temperature = 0.0;
    int max_tokens = 0;
    std::vector<ChatMessage> messages;
    std::string response_content;
    std::optional<TokenUsage> usage;
    std::string backend_id;
    int attempts = 1;
    double latency_ms = 0.0;
};

// Front door for all chat completions: retries transient transport failures
// with exponential backoff and appends every exchange to an audit log.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry = {});

    ChatResponse complete(const ChatRequest& request);

    // Extracts and validates the first JSON object in the reply; one
    // corrective re-ask on failure, then a structured-parse error carrying
    // the raw reply text. `extra_check` may normalize the object in place
    // and report a violation ("" accepts); it shares the same retry.
    nlohmann::json complete_structured(
        const ChatRequest& request, const StructureSpec& spec,
        const std::function<std::string(nlohmann::json&)>& extra_check = {});

    std::vector<ExchangeRecord> exchange_log() const;
    void dump_log_jsonl(const std::string& path) const;

    const std::string& backend_id() const { return backend_id_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    RetryPolicy retry_;
    std::string backend_id_;
    mutable std::mutex log_mutex_;
    std::vector<ExchangeRecord> log_;
};

}  // namespace agentcourt
