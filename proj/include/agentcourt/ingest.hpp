#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/embedding.hpp"
#include "agentcourt/model.hpp"

namespace agentcourt {

struct RawDocument {
    std::string id;
    std::string full_text;
};

enum class DocCategory { both, complaint_only, neither };

const char* doc_category_name(DocCategory category);

// Section markers are plain phrases searched verbatim; jurisdictions differ,
// so they are data rather than code.
struct MarkerConfig {
    std::vector<std::string> complaint_markers;
    std::vector<std::string> defense_markers;

    static MarkerConfig defaults();
};

// Anonymization happens upstream; these patterns only verify nothing
// obviously identifying slipped through.
struct PiiPatterns {
    std::vector<std::string> patterns;  // ECMAScript regexes

    static PiiPatterns defaults();
};

// Matched snippets; empty means the text passes.
std::vector<std::string> find_pii(const std::string& text, const PiiPatterns& patterns);

DocCategory classify_document(const RawDocument& doc, const MarkerConfig& markers);

// The two pleading texts, trimmed. Requires classify = both; a marker whose
// span is empty or overlaps the other section is an extraction failure.
std::pair<std::string, std::string> extract_pleadings(const RawDocument& doc,
                                                      const MarkerConfig& markers);

struct KMeansResult {
    std::vector<int> assignment;  // point index -> cluster
    std::vector<Vector> centroids;
    int iterations = 0;
};

// Lloyd's iterations over squared Euclidean distance. Initial centroids are
// the first k points of a seeded shuffle (std::mt19937_64); assignment ties
// go to the lowest cluster index; an empty cluster is reseeded to the point
// farthest from its current centroid. Stops when assignments stabilize or
// after max_iterations.
KMeansResult kmeans(const std::vector<Vector>& points, size_t k, uint64_t seed,
                    int max_iterations = 100);

struct CorpusManifest {
    std::map<std::string, int> category_counts;
    std::vector<std::string> selected_ids;          // in corpus order
    std::map<std::string, int> cluster_assignment;  // case id -> cluster
    size_t k_clusters = 0;
    int64_t seed = 0;

    nlohmann::json to_json() const;
    static CorpusManifest from_json(const nlohmann::json& doc);
};

// Embeds each case's complaint, clusters, then takes a per-cluster quota of
// round(target * cluster_size / N) members nearest the centroid, remainder
// balanced onto the largest clusters. Deterministic under (corpus order, seed).
CorpusManifest dedup_select(const std::vector<CaseRecord>& corpus, size_t target_count,
                            size_t k_clusters, int64_t seed, EmbeddingProvider& provider);

// Corpus I/O: a directory of UTF-8 .txt files or a JSON-Lines file with
// {"id", "text"} records.
std::vector<RawDocument> load_raw_documents(const std::string& path);

nlohmann::json case_to_json(const CaseRecord& record);       // schema case/1
CaseRecord case_from_json(const nlohmann::json& doc);
std::vector<CaseRecord> load_cases_jsonl(const std::string& path);
void save_cases_jsonl(const std::vector<CaseRecord>& cases, const std::string& path);

struct IngestResult {
    std::vector<CaseRecord> cases;  // selected cases, corpus order
    CorpusManifest manifest;
    std::vector<std::string> failed_documents;  // id: reason
};

// The full pipeline: classify, screen for PII, extract pleadings, dedup.
IngestResult run_ingest(const std::vector<RawDocument>& docs, const MarkerConfig& markers,
                        const PiiPatterns& pii, size_t target_count, size_t k_clusters,
                        int64_t seed, EmbeddingProvider& provider);

}  // namespace agentcourt
