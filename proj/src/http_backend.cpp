#include <memory>

#ifdef AGENTCOURT_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "agentcourt/gateway.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

namespace {

struct SplitUrl {
    std::string origin;       // scheme://host[:port]
    std::string path_prefix;  // possibly empty, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::config, "base_url must include a scheme: " + base_url);
    auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

bool is_timeout(httplib::Error err) {
    return err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
           err == httplib::Error::Write;
}

class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (config_.base_url.empty()) throw Error(ErrorKind::config, "chat backend base_url is empty");
        url_ = split_base_url(config_.base_url);
    }

    ChatResponse complete(const ChatRequest& request) override {
        nlohmann::json messages = nlohmann::json::array();
        for (const auto& msg : request.messages)
            messages.push_back({{"role", msg_role_name(msg.role)}, {"content", msg.content}});
        const nlohmann::json body = {
            {"model", config_.model},
            {"messages", messages},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens},
        };

        httplib::Client client(url_.origin);
        client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post(url_.path_prefix + "/chat/completions", headers, body.dump(),
                               "application/json");
        if (!res) {
            const auto err = res.error();
            const auto kind = is_timeout(err) ? ErrorKind::timeout : ErrorKind::transport;
            throw GatewayError(kind, request.tag, "http error: " + httplib::to_string(err));
        }
        if (res->status == 401 || res->status == 403)
            throw GatewayError(ErrorKind::auth, request.tag,
                               "authentication rejected (status " + std::to_string(res->status) + ")");
        if (res->status == 408)
            throw GatewayError(ErrorKind::timeout, request.tag, "request timed out (status 408)");
        if (res->status != 200)
            throw GatewayError(ErrorKind::transport, request.tag,
                               "unexpected status " + std::to_string(res->status) + ": " +
                                   res->body.substr(0, 200));

        auto doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded())
            throw GatewayError(ErrorKind::transport, request.tag, "response body is not JSON");
        ChatResponse response;
        response.backend_id = id();
        try {
            response.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(ErrorKind::transport, request.tag,
                               std::string("unexpected response shape: ") + e.what());
        }
        if (doc.contains("usage") && doc["usage"].is_object()) {
            TokenUsage usage;
            usage.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            usage.completion_tokens = doc["usage"].value("completion_tokens", 0);
            response.usage = usage;
        }
        return response;
    }

    std::string id() const override { return "http:" + config_.model; }

private:
    HttpBackendConfig config_;
    SplitUrl url_;
};

}  // namespace

std::shared_ptr<ChatBackend> make_http_backend(const HttpBackendConfig& config) {
    return std::make_shared<HttpChatBackend>(config);
}

}  // namespace agentcourt
