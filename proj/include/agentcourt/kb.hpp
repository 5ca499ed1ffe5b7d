#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/embedding.hpp"
#include "agentcourt/errors.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

struct UsageStats {
    int64_t times_retrieved = 0;
    std::vector<int> effectiveness_scores;

    bool operator==(const UsageStats&) const = default;
};

enum class RegulationSource { direct, reflect, opponent };

const char* regulation_source_name(RegulationSource source);
RegulationSource regulation_source_from_name(const std::string& name);

struct RegulationEntry {
    std::string entry_id;
    std::string content;  // provision text
    std::string purpose;
    std::string issue;
    RegulationSource source = RegulationSource::direct;
    UsageStats usage;

    bool operator==(const RegulationEntry&) const = default;
};

enum class ExperienceOrigin { self, adversarial };

const char* experience_origin_name(ExperienceOrigin origin);
ExperienceOrigin experience_origin_from_name(const std::string& name);

struct ExperienceEntry {
    std::string entry_id;
    std::string context;  // case background
    std::string content;  // the experience description
    std::vector<std::string> focus_points;  // 3 to 5 items
    std::vector<std::string> guidelines;    // 3 to 5 items
    ExperienceOrigin origin = ExperienceOrigin::self;
    std::vector<std::string> merged_origins;  // set on dedup across origins

    bool operator==(const ExperienceEntry&) const = default;
};

struct CaseEntry {
    std::string entry_id;
    std::string content;  // case name plus background
    std::string case_type;
    std::vector<std::string> keywords;               // 3 to 5 items
    std::vector<std::string> quick_reaction_points;  // 3 to 5 items
    std::vector<std::string> response_directions;    // 3 to 5 items

    bool operator==(const CaseEntry&) const = default;
};

// Stable id: kind prefix + hash of whitespace/punctuation-folded content.
std::string make_entry_id(KbKind kind, const std::string& content);

void validate_entry(const RegulationEntry& entry);
void validate_entry(const ExperienceEntry& entry);
void validate_entry(const CaseEntry& entry);

KbKind entry_kind(const RegulationEntry&);
KbKind entry_kind(const ExperienceEntry&);
KbKind entry_kind(const CaseEntry&);

// Folds `incoming` into the kept entry when the two were judged duplicates.
void merge_entries(RegulationEntry& incumbent, const RegulationEntry& incoming);
void merge_entries(ExperienceEntry& incumbent, const ExperienceEntry& incoming);
void merge_entries(CaseEntry& incumbent, const CaseEntry& incoming);

nlohmann::json entry_to_json(const RegulationEntry& entry);
nlohmann::json entry_to_json(const ExperienceEntry& entry);
nlohmann::json entry_to_json(const CaseEntry& entry);
void entry_from_json(const nlohmann::json& doc, RegulationEntry& out);
void entry_from_json(const nlohmann::json& doc, ExperienceEntry& out);
void entry_from_json(const nlohmann::json& doc, CaseEntry& out);

// Prompt-facing rendering; the entry content appears verbatim.
std::string render_entry_text(const RegulationEntry& entry);
std::string render_entry_text(const ExperienceEntry& entry);
std::string render_entry_text(const CaseEntry& entry);

struct RetrievedItem {
    std::string entry_id;
    std::string text;
    double score = 0.0;
};

enum class InsertOutcome { added, merged };

// Threshold above which two entries with different normalized content are
// still treated as duplicates.
inline constexpr double kDedupCosine = 0.95;

// Entries consulted per store per retrieval.
inline constexpr size_t kDefaultRetrievalK = 3;

// One knowledge store: entries in canonical entry_id order plus a cosine
// index over entry content. Entries never leave; inserts either add or merge.
template <typename Entry>
class EntryStore {
public:
    explicit EntryStore(std::shared_ptr<EmbeddingProvider> provider)
        : provider_(std::move(provider)), index_(provider_->dim()) {
        if (!provider_) throw Error(ErrorKind::config, "store needs an embedding provider");
    }

    // Validates, assigns entry_id from content when blank, embeds, then
    // either appends or merges into a duplicate (normalized-content equality
    // or cosine >= kDedupCosine against any incumbent).
    InsertOutcome insert(Entry entry) {
        if (entry.entry_id.empty()) entry.entry_id = make_entry_id(entry_kind(entry), entry.content);
        validate_entry(entry);
        if (Entry* incumbent = find_mutable(entry.entry_id)) {
            merge_entries(*incumbent, entry);
            return InsertOutcome::merged;
        }
        Vector vec = provider_->embed(entry.content);
        for (auto& existing : entries_) {
            const Vector* stored = index_.find(existing.entry_id);
            if (stored && cosine(*stored, vec) >= kDedupCosine) {
                merge_entries(existing, entry);
                return InsertOutcome::merged;
            }
        }
        index_.add(entry.entry_id, std::move(vec));
        insert_sorted(std::move(entry));
        return InsertOutcome::added;
    }

    // Load path: trusts prior dedup, re-attaches the persisted vector.
    void restore(Entry entry, Vector vec) {
        validate_entry(entry);
        if (find(entry.entry_id))
            throw Error(ErrorKind::duplicate_id, "entry '" + entry.entry_id + "' restored twice");
        index_.add(entry.entry_id, std::move(vec));
        insert_sorted(std::move(entry));
    }

    const Entry* find(const std::string& entry_id) const {
        for (const auto& e : entries_)
            if (e.entry_id == entry_id) return &e;
        return nullptr;
    }

    // Mutation is restricted to non-content fields (usage stats, origins);
    // content edits would orphan the index vector.
    Entry* find_mutable(const std::string& entry_id) {
        for (auto& e : entries_)
            if (e.entry_id == entry_id) return &e;
        return nullptr;
    }

    // Top-k by cosine; empty store yields no results rather than an error.
    std::vector<RetrievedItem> retrieve(const std::string& query, size_t k) const {
        if (entries_.empty()) return {};
        std::vector<RetrievedItem> out;
        for (const auto& scored : index_.top_k(provider_->embed(query), k)) {
            const Entry* entry = find(scored.entry_id);
            out.push_back({scored.entry_id, render_entry_text(*entry), scored.score});
        }
        return out;
    }

    const std::vector<Entry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }
    const VectorIndex& index() const { return index_; }

private:
    void insert_sorted(Entry entry) {
        auto pos = std::lower_bound(entries_.begin(), entries_.end(), entry,
                                    [](const Entry& a, const Entry& b) { return a.entry_id < b.entry_id; });
        entries_.insert(pos, std::move(entry));
    }

    std::shared_ptr<EmbeddingProvider> provider_;
    std::vector<Entry> entries_;
    VectorIndex index_;
};

using RegulationStore = EntryStore<RegulationEntry>;
using ExperienceStore = EntryStore<ExperienceEntry>;
using CaseStore = EntryStore<CaseEntry>;

// The triple of stores lawyers draw on, sharing one embedding provider.
class KnowledgeBases {
public:
    explicit KnowledgeBases(std::shared_ptr<EmbeddingProvider> provider)
        : provider_(std::move(provider)),
          regulations_(provider_),
          experience_(provider_),
          cases_(provider_) {}

    RegulationStore& regulations() { return regulations_; }
    const RegulationStore& regulations() const { return regulations_; }
    ExperienceStore& experience() { return experience_; }
    const ExperienceStore& experience() const { return experience_; }
    CaseStore& cases() { return cases_; }
    const CaseStore& cases() const { return cases_; }

    const std::shared_ptr<EmbeddingProvider>& provider() const { return provider_; }

    size_t size(KbKind kind) const;
    size_t total_size() const { return regulations_.size() + experience_.size() + cases_.size(); }
    bool empty(KbKind kind) const { return size(kind) == 0; }

    std::vector<RetrievedItem> retrieve(KbKind kind, const std::string& query, size_t k) const;

private:
    std::shared_ptr<EmbeddingProvider> provider_;
    RegulationStore regulations_;
    ExperienceStore experience_;
    CaseStore cases_;
};

}  // namespace agentcourt
