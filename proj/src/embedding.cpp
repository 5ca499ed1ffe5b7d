#include "agentcourt/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "agentcourt/errors.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw Error(ErrorKind::dimension_mismatch, "cosine over vectors of dim " + std::to_string(a.size()) +
                                                       " and " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

// ASCII alnum runs plus raw non-ASCII bytes form tokens, lowercased.
std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        const bool keep = c >= 0x80 || std::isalnum(c);
        if (keep) {
            current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace

HashingEmbedder::HashingEmbedder(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw Error(ErrorKind::config, "embedder dim must be positive");
}

Vector HashingEmbedder::embed(const std::string& text) {
    if (trim(text).empty()) throw Error(ErrorKind::empty_text, "cannot embed empty text");
    auto tokens = tokenize(text);
    if (tokens.empty()) tokens.push_back(trim(text));

    Vector out(dim_, 0.0);
    auto bump = [&](const std::string& feature) {
        const uint64_t h = fnv1a64(feature, seed_ * 0x9E3779B97F4A7C15ULL + 0xCBF29CE484222325ULL);
        const size_t bucket = static_cast<size_t>(h % dim_);
        const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
        out[bucket] += sign;
    };
    for (const auto& token : tokens) bump(token);
    for (size_t i = 0; i + 1 < tokens.size(); ++i) bump(tokens[i] + " " + tokens[i + 1]);

    double norm = 0.0;
    for (double v : out) norm += v * v;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : out) v /= norm;
    }
    return out;
}

std::string HashingEmbedder::id() const {
    return "hash:dim=" + std::to_string(dim_) + ":seed=" + std::to_string(seed_);
}

std::shared_ptr<EmbeddingProvider> embedding_provider_from_id(const std::string& id) {
    if (id.rfind("hash:", 0) != 0) return nullptr;
    size_t dim = 64;
    uint64_t seed = 1;
    auto dim_pos = id.find("dim=");
    auto seed_pos = id.find("seed=");
    if (dim_pos != std::string::npos) dim = std::stoul(id.substr(dim_pos + 4));
    if (seed_pos != std::string::npos) seed = std::stoull(id.substr(seed_pos + 5));
    return std::make_shared<HashingEmbedder>(dim, seed);
}

VectorIndex::VectorIndex(size_t dim) : dim_(dim) {
    if (dim_ == 0) throw Error(ErrorKind::config, "index dim must be positive");
}

void VectorIndex::add(const std::string& entry_id, Vector vector) {
    if (vector.size() != dim_)
        throw Error(ErrorKind::dimension_mismatch, "entry '" + entry_id + "' has dim " +
                                                       std::to_string(vector.size()) + ", index dim " +
                                                       std::to_string(dim_));
    for (double v : vector) {
        if (!std::isfinite(v))
            throw Error(ErrorKind::contract, "entry '" + entry_id + "' has non-finite components");
    }
    if (contains(entry_id)) throw Error(ErrorKind::duplicate_id, "entry '" + entry_id + "' already indexed");
    entries_.emplace_back(entry_id, std::move(vector));
}

bool VectorIndex::contains(const std::string& entry_id) const {
    return find(entry_id) != nullptr;
}

const Vector* VectorIndex::find(const std::string& entry_id) const {
    for (const auto& [id, vec] : entries_) {
        if (id == entry_id) return &vec;
    }
    return nullptr;
}

std::vector<ScoredEntry> VectorIndex::top_k(const Vector& query, size_t k) const {
    if (k < 1) throw Error(ErrorKind::contract, "top_k needs k >= 1");
    if (entries_.empty()) throw Error(ErrorKind::empty_index, "top_k over an empty index");

    std::vector<ScoredEntry> scored;
    scored.reserve(entries_.size());
    for (const auto& [id, vec] : entries_) scored.push_back({id, cosine(query, vec)});

    const size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(take), scored.end(),
                      [](const ScoredEntry& a, const ScoredEntry& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.entry_id < b.entry_id;
                      });
    scored.resize(take);
    return scored;
}

namespace {

class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config) : config_(std::move(config)) {
        if (config_.base_url.empty()) throw Error(ErrorKind::config, "embedding base_url is empty");
        if (config_.dim == 0) throw Error(ErrorKind::config, "embedding dim must be configured");
    }

    Vector embed(const std::string& text) override;
    size_t dim() const override { return config_.dim; }
    std::string id() const override { return "http-embed:" + config_.model; }

private:
    HttpEmbeddingConfig config_;
};

}  // namespace

std::shared_ptr<EmbeddingProvider> make_http_embedding_provider(const HttpEmbeddingConfig& config) {
    return std::make_shared<HttpEmbeddingProvider>(config);
}

}  // namespace agentcourt

// The HTTP implementation lives in http_backend.cpp's translation unit style;
// kept here to keep httplib out of this header-light unit.
#ifdef AGENTCOURT_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace agentcourt {

Vector HttpEmbeddingProvider::embed(const std::string& text) {
    if (trim(text).empty()) throw Error(ErrorKind::empty_text, "cannot embed empty text");
    auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::config, "base_url must include a scheme: " + config_.base_url);
    auto path_start = config_.base_url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? config_.base_url
                                                         : config_.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(origin);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    const nlohmann::json body = {{"model", config_.model}, {"input", text}};
    auto res = client.Post(prefix + "/embeddings", headers, body.dump(), "application/json");
    if (!res) throw Error(ErrorKind::transport, "embedding http error: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorKind::transport, "embedding endpoint status " + std::to_string(res->status));
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded())
        throw Error(ErrorKind::transport, "embedding response is not JSON");
    Vector out;
    try {
        out = doc.at("data").at(0).at("embedding").get<Vector>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::transport, std::string("unexpected embedding response shape: ") + e.what());
    }
    if (out.size() != config_.dim)
        throw Error(ErrorKind::dimension_mismatch, "embedding endpoint returned dim " +
                                                       std::to_string(out.size()) + ", expected " +
                                                       std::to_string(config_.dim));
    return out;
}

}  // namespace agentcourt
