#include "agentcourt/gateway.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

const char* msg_role_name(MsgRole role) {
    switch (role) {
        case MsgRole::system: return "system";
        case MsgRole::user: return "user";
        case MsgRole::assistant: return "assistant";
    }
    return "?";
}

void ChatRequest::validate() const {
    if (messages.empty()) throw Error(ErrorKind::contract, "chat request needs at least one message");
    if (messages.front().role == MsgRole::assistant)
        throw Error(ErrorKind::contract, "first message must be system or user");
}

std::string ChatRequest::joined_content() const {
    std::string out;
    for (const auto& msg : messages) {
        out += msg.content;
        out += "\n";
    }
    return out;
}

void StructureSpec::validate() const {
    for (const auto& field : fields) {
        if (field.required) return;
    }
    throw Error(ErrorKind::contract, "structure spec needs at least one required field");
}

std::string StructureSpec::describe() const {
    std::string out = "{";
    for (size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (i) out += ", ";
        out += "'" + f.name + "': ";
        switch (f.kind) {
            case FieldKind::boolean: out += "bool"; break;
            case FieldKind::string: out += f.non_empty ? "non-empty string" : "string"; break;
            case FieldKind::string_list:
                out += "list of strings";
                if (f.min_items > 0 || f.max_items != std::numeric_limits<size_t>::max())
                    out += " (" + std::to_string(f.min_items) + "-" + std::to_string(f.max_items) + " items)";
                break;
            case FieldKind::object_list: out += "list of objects"; break;
            case FieldKind::int_in_range:
                out += "integer";
                if (f.min_int != std::numeric_limits<int>::min() || f.max_int != std::numeric_limits<int>::max())
                    out += " in [" + std::to_string(f.min_int) + ", " + std::to_string(f.max_int) + "]";
                break;
        }
    }
    out += "}";
    return out;
}

std::optional<nlohmann::json> extract_first_json_object(const std::string& text) {
    for (size_t start = text.find('{'); start != std::string::npos; start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    auto candidate = nlohmann::json::parse(text.substr(start, i - start + 1), nullptr, false);
                    if (!candidate.is_discarded() && candidate.is_object()) return candidate;
                    break;  // malformed; resume scanning after this '{'
                }
            }
        }
    }
    return std::nullopt;
}

std::string check_structure(const nlohmann::json& object, const StructureSpec& spec) {
    for (const auto& field : spec.fields) {
        auto it = object.find(field.name);
        if (it == object.end()) {
            if (field.required) return "missing required key '" + field.name + "'";
            continue;
        }
        const auto& value = *it;
        switch (field.kind) {
            case FieldKind::boolean:
                if (!value.is_boolean()) return "key '" + field.name + "' must be a bool";
                break;
            case FieldKind::string:
                if (!value.is_string()) return "key '" + field.name + "' must be a string";
                if (field.non_empty && trim(value.get<std::string>()).empty())
                    return "key '" + field.name + "' must be a non-empty string";
                break;
            case FieldKind::string_list: {
                if (!value.is_array()) return "key '" + field.name + "' must be a list of strings";
                for (const auto& item : value)
                    if (!item.is_string()) return "key '" + field.name + "' must contain only strings";
                if (value.size() < field.min_items || value.size() > field.max_items)
                    return "key '" + field.name + "' must have " + std::to_string(field.min_items) + "-" +
                           std::to_string(field.max_items) + " items, got " + std::to_string(value.size());
                break;
            }
            case FieldKind::object_list: {
                if (!value.is_array()) return "key '" + field.name + "' must be a list of objects";
                for (const auto& item : value)
                    if (!item.is_object()) return "key '" + field.name + "' must contain only objects";
                break;
            }
            case FieldKind::int_in_range:
                if (!value.is_number_integer()) return "key '" + field.name + "' must be an integer";
                if (value.get<int64_t>() < field.min_int || value.get<int64_t>() > field.max_int)
                    return "key '" + field.name + "' out of range [" + std::to_string(field.min_int) + ", " +
                           std::to_string(field.max_int) + "]";
                break;
        }
    }
    return "";
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script) : script_(std::move(script)) {
    if (script_.empty()) throw Error(ErrorKind::contract, "scripted backend needs a non-empty script");
    consumed_.assign(script_.size(), false);
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (size_t i = 0; i < script_.size(); ++i) {
        if (consumed_[i]) continue;
        const auto& match = script_[i].match;
        bool applies = match.empty() || match == request.tag || contains(request.tag, match);
        if (!applies) {
            // Fall back to matching against the rendered prompt text.
            for (const auto& msg : request.messages) {
                if (contains(msg.content, match)) {
                    applies = true;
                    break;
                }
            }
        }
        if (applies) {
            consumed_[i] = true;
            ChatResponse response;
            response.content = script_[i].reply;
            response.backend_id = id();
            return response;
        }
    }
    throw GatewayError(ErrorKind::script_exhausted, request.tag,
                       "no unconsumed script entry matches tag '" + request.tag + "'");
}

size_t ScriptedBackend::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    size_t n = 0;
    for (bool c : consumed_)
        if (!c) ++n;
    return n;
}

std::vector<ScriptEntry> load_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open script file " + path);
    std::vector<ScriptEntry> script;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw Error(ErrorKind::io, path + ":" + std::to_string(line_no) + ": not a JSON object");
        ScriptEntry entry;
        entry.match = doc.value("match", "");
        if (doc.contains("reply_json"))
            entry.reply = doc.at("reply_json").dump();
        else
            entry.reply = doc.at("reply").get<std::string>();
        script.push_back(std::move(entry));
    }
    return script;
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy retry)
    : backend_(std::move(backend)), retry_(retry) {
    if (!backend_) throw Error(ErrorKind::config, "gateway needs a backend");
    backend_id_ = backend_->id();
}

ChatResponse Gateway::complete(const ChatRequest& request) {
    request.validate();
    const auto start = std::chrono::steady_clock::now();
    int attempts = 0;
    ChatResponse response;
    for (;;) {
        ++attempts;
        try {
            response = backend_->complete(request);
            break;
        } catch (const Error& err) {
            const bool transient = err.kind() == ErrorKind::transport || err.kind() == ErrorKind::timeout;
            if (!transient || attempts > retry_.max_retries) throw;
            const int delay_ms = retry_.backoff_base_ms << (attempts - 1);
            logging::warn("gateway", "retry " + std::to_string(attempts) + "/" +
                                         std::to_string(retry_.max_retries) + " after " +
                                         std::to_string(delay_ms) + "ms for tag '" + request.tag +
                                         "': " + err.what());
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        }
    }
    const auto elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    ExchangeRecord record;
    record.tag = request.tag;
    record.temperature = request.temperature;
    record.max_tokens = request.max_tokens;
    record.messages = request.messages;
    record.response_content = response.content;
    record.usage = response.usage;
    record.backend_id = response.backend_id;
    record.attempts = attempts;
    record.latency_ms = elapsed;
    {
        std::lock_guard<std::mutex> lock(log_mutex_);
        log_.push_back(std::move(record));
    }
    std::string usage_note;
    if (response.usage) {
        usage_note = " tokens=" + std::to_string(response.usage->prompt_tokens) + "+" +
                     std::to_string(response.usage->completion_tokens);
    }
    logging::debug("gateway", "tag=" + request.tag + " attempts=" + std::to_string(attempts) +
                                  " latency_ms=" + std::to_string(elapsed) + usage_note);
    return response;
}

nlohmann::json Gateway::complete_structured(
    const ChatRequest& request, const StructureSpec& spec,
    const std::function<std::string(nlohmann::json&)>& extra_check) {
    spec.validate();

    auto attempt = [&](const ChatRequest& req) -> std::pair<std::optional<nlohmann::json>, std::string> {
        ChatResponse response = complete(req);
        auto object = extract_first_json_object(response.content);
        if (!object) return {std::nullopt, response.content};
        std::string violation = check_structure(*object, spec);
        if (violation.empty() && extra_check) violation = extra_check(*object);
        if (!violation.empty()) {
            logging::debug("gateway", "structured reply rejected for tag '" + req.tag + "': " + violation);
            return {std::nullopt, response.content};
        }
        return {object, response.content};
    };

    auto [object, raw] = attempt(request);
    if (object) return *object;

    ChatRequest corrective = request;
    corrective.messages.push_back(
        {MsgRole::user, "Your previous reply could not be used. Respond with exactly one JSON object "
                        "matching this format and nothing else: " +
                            spec.describe()});
    auto [second, raw2] = attempt(corrective);
    if (second) return *second;
    throw StructuredParseError(request.tag, "reply did not match " + spec.describe() + " after one retry",
                               raw2.empty() ? raw : raw2);
}

std::vector<ExchangeRecord> Gateway::exchange_log() const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    return log_;
}

void Gateway::dump_log_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    for (const auto& record : exchange_log()) {
        nlohmann::json messages = nlohmann::json::array();
        for (const auto& msg : record.messages)
            messages.push_back({{"role", msg_role_name(msg.role)}, {"content", msg.content}});
        nlohmann::json doc = {
            {"tag", record.tag},
            {"temperature", record.temperature},
            {"max_tokens", record.max_tokens},
            {"messages", messages},
            {"response", record.response_content},
            {"backend", record.backend_id},
            {"attempts", record.attempts},
            {"latency_ms", record.latency_ms},
        };
        if (record.usage) {
            doc["usage"] = {{"prompt_tokens", record.usage->prompt_tokens},
                            {"completion_tokens", record.usage->completion_tokens}};
        }
        out << doc.dump() << "\n";
    }
}

}  // namespace agentcourt
