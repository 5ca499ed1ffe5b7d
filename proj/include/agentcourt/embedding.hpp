#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace agentcourt {

using Vector = std::vector<double>;

double cosine(const Vector& a, const Vector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Vector embed(const std::string& text) = 0;
    virtual size_t dim() const = 0;
    virtual std::string id() const = 0;
};

// Offline deterministic embedder: token unigrams and bigrams feature-hashed
// into `dim` signed buckets, L2-normalized.
class HashingEmbedder : public EmbeddingProvider {
public:
    explicit HashingEmbedder(size_t dim = 64, uint64_t seed = 1);

    Vector embed(const std::string& text) override;
    size_t dim() const override { return dim_; }
    std::string id() const override;

private:
    size_t dim_;
    uint64_t seed_;
};

// Reconstructs a hashing embedder from its provider id ("hash:dim=64:seed=1");
// returns nullptr for ids of other provider families.
std::shared_ptr<EmbeddingProvider> embedding_provider_from_id(const std::string& id);

struct HttpEmbeddingConfig {
    std::string base_url;
    std::string model;
    std::string api_key;
    size_t dim = 0;  // expected dimension; checked against replies
    int timeout_ms = 30000;
};

std::shared_ptr<EmbeddingProvider> make_http_embedding_provider(const HttpEmbeddingConfig& config);

struct ScoredEntry {
    std::string entry_id;
    double score = 0.0;
};

// Exact cosine top-k over in-memory entries. Concurrent reads are safe;
// writes need exclusive access.
class VectorIndex {
public:
    explicit VectorIndex(size_t dim);

    void add(const std::string& entry_id, Vector vector);
    bool contains(const std::string& entry_id) const;
    const Vector* find(const std::string& entry_id) const;

    // min(k, size) results by descending cosine; ties broken by ascending
    // entry_id. Throws on empty index or k < 1.
    std::vector<ScoredEntry> top_k(const Vector& query, size_t k) const;

    size_t size() const { return entries_.size(); }
    size_t dim() const { return dim_; }

    const std::vector<std::pair<std::string, Vector>>& entries() const { return entries_; }

private:
    size_t dim_;
    std::vector<std::pair<std::string, Vector>> entries_;
};

}  // namespace agentcourt
