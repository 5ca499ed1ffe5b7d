#include "agentcourt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "agentcourt/errors.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

const char* doc_category_name(DocCategory category) {
    switch (category) {
        case DocCategory::both: return "both";
        case DocCategory::complaint_only: return "complaint_only";
        case DocCategory::neither: return "neither";
    }
    return "neither";
}

MarkerConfig MarkerConfig::defaults() {
    return {{"Plaintiff claims:", "Complaint:", "Indictment:"},
            {"Defendant argues:", "Defense statement:", "Defense:"}};
}

PiiPatterns PiiPatterns::defaults() {
    return {{
        R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})",  // email addresses
        R"(\d{3}-\d{2}-\d{4})",                               // SSN-style ids
        R"(\d{11,})",                                         // long digit runs (phones, id cards)
    }};
}

std::vector<std::string> find_pii(const std::string& text, const PiiPatterns& patterns) {
    std::vector<std::string> hits;
    for (const auto& pattern : patterns.patterns) {
        std::regex re;
        try {
            re = std::regex(pattern);
        } catch (const std::regex_error& e) {
            throw Error(ErrorKind::config, "bad PII pattern '" + pattern + "': " + e.what());
        }
        auto begin = std::sregex_iterator(text.begin(), text.end(), re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) hits.push_back(it->str());
    }
    return hits;
}

namespace {

struct MarkerHit {
    size_t pos = std::string::npos;
    size_t len = 0;

    bool found() const { return pos != std::string::npos; }
    size_t end() const { return pos + len; }
};

// Earliest occurrence of any pattern; at equal position the longer match wins.
MarkerHit find_marker(const std::string& text, const std::vector<std::string>& patterns) {
    MarkerHit best;
    for (const auto& pattern : patterns) {
        if (pattern.empty()) continue;
        size_t pos = text.find(pattern);
        if (pos == std::string::npos) continue;
        if (!best.found() || pos < best.pos || (pos == best.pos && pattern.size() > best.len))
            best = {pos, pattern.size()};
    }
    return best;
}

}  // namespace

DocCategory classify_document(const RawDocument& doc, const MarkerConfig& markers) {
    if (doc.full_text.empty()) throw Error(ErrorKind::contract, "document '" + doc.id + "' is empty");
    const bool has_complaint = find_marker(doc.full_text, markers.complaint_markers).found();
    const bool has_defense = find_marker(doc.full_text, markers.defense_markers).found();
    if (has_complaint && has_defense) return DocCategory::both;
    if (has_complaint) return DocCategory::complaint_only;
    return DocCategory::neither;
}

std::pair<std::string, std::string> extract_pleadings(const RawDocument& doc,
                                                      const MarkerConfig& markers) {
    if (classify_document(doc, markers) != DocCategory::both)
        throw Error(ErrorKind::contract,
                    "document '" + doc.id + "' lacks both sections; nothing to extract");
    const std::string& text = doc.full_text;
    const MarkerHit complaint = find_marker(text, markers.complaint_markers);
    const MarkerHit defense = find_marker(text, markers.defense_markers);
    if (complaint.pos < defense.end() && defense.pos < complaint.end())
        throw Error(ErrorKind::extraction_failure,
                    "document '" + doc.id + "' has overlapping section markers");

    std::string complaint_text, defense_text;
    if (complaint.pos < defense.pos) {
        complaint_text = text.substr(complaint.end(), defense.pos - complaint.end());
        defense_text = text.substr(defense.end());
    } else {
        defense_text = text.substr(defense.end(), complaint.pos - defense.end());
        complaint_text = text.substr(complaint.end());
    }
    complaint_text = trim(complaint_text);
    defense_text = trim(defense_text);
    if (complaint_text.empty())
        throw Error(ErrorKind::extraction_failure,
                    "document '" + doc.id + "' has an empty complaint section");
    if (defense_text.empty())
        throw Error(ErrorKind::extraction_failure,
                    "document '" + doc.id + "' has an empty defense section");
    return {complaint_text, defense_text};
}

namespace {

double squared_distance(const Vector& a, const Vector& b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

KMeansResult kmeans(const std::vector<Vector>& points, size_t k, uint64_t seed,
                    int max_iterations) {
    if (points.empty()) throw Error(ErrorKind::empty_input, "kmeans over no points");
    if (k < 1 || k > points.size())
        throw Error(ErrorKind::contract, "kmeans needs 1 <= k <= point count, got k=" +
                                             std::to_string(k));
    const size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw Error(ErrorKind::dimension_mismatch, "kmeans points differ in dim");

    std::vector<size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    KMeansResult result;
    result.centroids.reserve(k);
    for (size_t c = 0; c < k; ++c) result.centroids.push_back(points[order[c]]);
    result.assignment.assign(points.size(), -1);

    for (int iter = 0; iter < max_iterations; ++iter) {
        result.iterations = iter + 1;
        std::vector<int> next(points.size(), 0);
        for (size_t i = 0; i < points.size(); ++i) {
            double best = squared_distance(points[i], result.centroids[0]);
            int best_c = 0;
            for (size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points[i], result.centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            next[i] = best_c;
        }

        std::vector<Vector> sums(k, Vector(dim, 0.0));
        std::vector<size_t> counts(k, 0);
        for (size_t i = 0; i < points.size(); ++i) {
            ++counts[next[i]];
            for (size_t d = 0; d < dim; ++d) sums[next[i]][d] += points[i][d];
        }
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (size_t d = 0; d < dim; ++d) sums[c][d] /= static_cast<double>(counts[c]);
                result.centroids[c] = std::move(sums[c]);
                continue;
            }
            // Reseed an empty cluster to the point farthest from its own
            // centroid; that point migrates on the next assignment pass.
            double farthest = -1.0;
            size_t pick = 0;
            for (size_t i = 0; i < points.size(); ++i) {
                const double d = squared_distance(points[i], result.centroids[next[i]]);
                if (d > farthest) {
                    farthest = d;
                    pick = i;
                }
            }
            result.centroids[c] = points[pick];
        }

        if (next == result.assignment) break;
        result.assignment = std::move(next);
    }
    return result;
}

nlohmann::json CorpusManifest::to_json() const {
    return {
        {"schema", "corpus-manifest/1"},
        {"category_counts", category_counts},
        {"selected_ids", selected_ids},
        {"cluster_assignment", cluster_assignment},
        {"k_clusters", k_clusters},
        {"seed", seed},
    };
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& doc) {
    const std::string schema = doc.value("schema", "");
    if (schema != "corpus-manifest/1")
        throw Error(ErrorKind::unsupported_version, "corpus manifest schema '" + schema + "'");
    CorpusManifest manifest;
    manifest.category_counts = doc.at("category_counts").get<std::map<std::string, int>>();
    manifest.selected_ids = doc.at("selected_ids").get<std::vector<std::string>>();
    manifest.cluster_assignment = doc.at("cluster_assignment").get<std::map<std::string, int>>();
    manifest.k_clusters = doc.at("k_clusters").get<size_t>();
    manifest.seed = doc.at("seed").get<int64_t>();
    return manifest;
}

CorpusManifest dedup_select(const std::vector<CaseRecord>& corpus, size_t target_count,
                            size_t k_clusters, int64_t seed, EmbeddingProvider& provider) {
    if (corpus.empty()) throw Error(ErrorKind::empty_input, "dedup_select over an empty corpus");
    if (target_count > corpus.size())
        throw Error(ErrorKind::contract, "target_count exceeds corpus size");
    if (k_clusters < 1 || k_clusters > corpus.size())
        throw Error(ErrorKind::contract, "k_clusters must be within corpus size");

    std::vector<Vector> points;
    points.reserve(corpus.size());
    for (const auto& record : corpus) points.push_back(provider.embed(record.complaint));

    KMeansResult clusters = kmeans(points, k_clusters, static_cast<uint64_t>(seed));

    std::vector<std::vector<size_t>> members(k_clusters);
    for (size_t i = 0; i < corpus.size(); ++i)
        members[static_cast<size_t>(clusters.assignment[i])].push_back(i);

    // Proportional quota, remainder balanced onto the largest clusters.
    const double n = static_cast<double>(corpus.size());
    std::vector<size_t> quota(k_clusters, 0);
    size_t assigned = 0;
    for (size_t c = 0; c < k_clusters; ++c) {
        quota[c] = static_cast<size_t>(
            round_half_up(static_cast<double>(target_count) * members[c].size() / n, 0));
        quota[c] = std::min(quota[c], members[c].size());
        assigned += quota[c];
    }
    std::vector<size_t> by_size(k_clusters);
    std::iota(by_size.begin(), by_size.end(), 0);
    std::stable_sort(by_size.begin(), by_size.end(), [&](size_t a, size_t b) {
        return members[a].size() > members[b].size();
    });
    while (assigned != target_count) {
        bool changed = false;
        for (size_t c : by_size) {
            if (assigned < target_count && quota[c] < members[c].size()) {
                ++quota[c];
                ++assigned;
                changed = true;
            } else if (assigned > target_count && quota[c] > 0) {
                --quota[c];
                --assigned;
                changed = true;
            }
            if (assigned == target_count) break;
        }
        if (!changed) break;  // every cluster saturated; cannot rebalance further
    }

    // Nearest-to-centroid members win each cluster's quota; ties break on
    // the case id for determinism.
    std::vector<bool> selected(corpus.size(), false);
    for (size_t c = 0; c < k_clusters; ++c) {
        auto ranked = members[c];
        std::sort(ranked.begin(), ranked.end(), [&](size_t a, size_t b) {
            const double da = squared_distance(points[a], clusters.centroids[c]);
            const double db = squared_distance(points[b], clusters.centroids[c]);
            if (da != db) return da < db;
            return corpus[a].id < corpus[b].id;
        });
        for (size_t r = 0; r < quota[c]; ++r) selected[ranked[r]] = true;
    }

    CorpusManifest manifest;
    manifest.k_clusters = k_clusters;
    manifest.seed = seed;
    manifest.category_counts["both"] = static_cast<int>(corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
        manifest.cluster_assignment[corpus[i].id] = clusters.assignment[i];
        if (selected[i]) manifest.selected_ids.push_back(corpus[i].id);
    }
    return manifest;
}

std::vector<RawDocument> load_raw_documents(const std::string& path) {
    namespace fs = std::filesystem;
    std::vector<RawDocument> docs;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".txt")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file);
            std::ostringstream buffer;
            buffer << in.rdbuf();
            docs.push_back({file.stem().string(), buffer.str()});
        }
        return docs;
    }
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open corpus '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw Error(ErrorKind::io, path + ":" + std::to_string(line_no) + ": not a JSON object");
        docs.push_back({doc.at("id").get<std::string>(), doc.at("text").get<std::string>()});
    }
    return docs;
}

nlohmann::json case_to_json(const CaseRecord& record) {
    return {
        {"schema", "case/1"},
        {"id", record.id},
        {"complaint", record.complaint},
        {"defense", record.defense},
        {"category", case_category_name(record.category)},
        {"source_meta", record.source_meta},
    };
}

CaseRecord case_from_json(const nlohmann::json& doc) {
    const std::string schema = doc.value("schema", "case/1");
    if (schema != "case/1")
        throw Error(ErrorKind::unsupported_version, "case schema '" + schema + "'");
    CaseRecord record;
    record.id = doc.at("id").get<std::string>();
    record.complaint = doc.at("complaint").get<std::string>();
    record.defense = doc.at("defense").get<std::string>();
    record.category = case_category_from_name(doc.value("category", "other"));
    record.source_meta = doc.value("source_meta", std::map<std::string, std::string>{});
    record.validate();
    return record;
}

std::vector<CaseRecord> load_cases_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open cases file '" + path + "'");
    std::vector<CaseRecord> cases;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw Error(ErrorKind::io, path + ":" + std::to_string(line_no) + ": not a JSON object");
        cases.push_back(case_from_json(doc));
    }
    return cases;
}

void save_cases_jsonl(const std::vector<CaseRecord>& cases, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write cases file '" + path + "'");
    for (const auto& record : cases) out << case_to_json(record).dump() << "\n";
    if (!out) throw Error(ErrorKind::io, "write failed for cases file '" + path + "'");
}

IngestResult run_ingest(const std::vector<RawDocument>& docs, const MarkerConfig& markers,
                        const PiiPatterns& pii, size_t target_count, size_t k_clusters,
                        int64_t seed, EmbeddingProvider& provider) {
    IngestResult result;
    std::vector<CaseRecord> extracted;
    for (const auto& doc : docs) {
        const DocCategory category = classify_document(doc, markers);
        ++result.manifest.category_counts[doc_category_name(category)];
        if (category != DocCategory::both) continue;
        auto hits = find_pii(doc.full_text, pii);
        if (!hits.empty()) {
            result.failed_documents.push_back(doc.id + ": PII pattern matched '" + hits.front() + "'");
            continue;
        }
        try {
            auto [complaint, defense] = extract_pleadings(doc, markers);
            CaseRecord record;
            record.id = doc.id;
            record.complaint = std::move(complaint);
            record.defense = std::move(defense);
            extracted.push_back(std::move(record));
        } catch (const Error& e) {
            result.failed_documents.push_back(doc.id + ": " + e.what());
        }
    }
    if (extracted.empty()) {
        logging::warn("ingest", "no usable documents; selection is empty");
        return result;
    }

    const size_t target = std::min(target_count, extracted.size());
    const size_t k = std::max<size_t>(1, std::min(k_clusters, extracted.size()));
    auto counts = result.manifest.category_counts;
    result.manifest = dedup_select(extracted, target, k, seed, provider);
    result.manifest.category_counts = std::move(counts);

    std::vector<bool> keep(extracted.size(), false);
    for (size_t i = 0; i < extracted.size(); ++i)
        keep[i] = std::find(result.manifest.selected_ids.begin(), result.manifest.selected_ids.end(),
                            extracted[i].id) != result.manifest.selected_ids.end();
    for (size_t i = 0; i < extracted.size(); ++i)
        if (keep[i]) result.cases.push_back(std::move(extracted[i]));
    return result;
}

}  // namespace agentcourt
