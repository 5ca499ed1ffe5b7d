#pragma once

// Shared fixtures: a fully scripted freight-damage dispute (the cargo case)
// with reply sets for trials and evolution passes, plus temp-dir and wiring
// helpers. Script entries are tag-matched, so multi-case scripts are just
// per-case blocks concatenated in run order.

#include <memory>
#include <string>
#include <vector>

#include "agentcourt/embedding.hpp"
#include "agentcourt/engine.hpp"
#include "agentcourt/gateway.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/prompts.hpp"

namespace agentcourt::testing {

// Refrigerated-cargo carriage dispute; the complaint cites Maritime Law
// Article 57 and claims USD 27,509.40.
CaseRecord cargo_case();

// Same dispute with id "cargo-<index+1>" and a per-index bill of lading.
CaseRecord cargo_case_variant(int index);

// The all-false planning reply.
std::string plan_none_json();

// Replies for one full 13-turn trial of cargo_case_variant(index) at three
// debate rounds with planning declining every store: 8 plan entries plus 13
// content entries, in call order.
std::vector<ScriptEntry> trial_script(int index = 0);

// Replies for one evolution pass over that trial's transcript: one extracted
// and one reflected law, four distinct experience summaries, one case
// distillation. On a fresh store this forces deltas of regulations +2,
// experience +4, cases +1.
std::vector<ScriptEntry> evolution_script(int index = 0);

// Trial replies where planning requests every store and each store kind gets
// a query reply. Query entries are a superset; runs with disabled or empty
// stores simply leave some unconsumed.
std::vector<ScriptEntry> retrieval_trial_script(int index = 0);

std::vector<ScriptEntry> concat(std::vector<std::vector<ScriptEntry>> parts);

// Serializes entries to the JSONL format load_script_file reads.
void write_script_file(const std::vector<ScriptEntry>& entries, const std::string& path);

std::shared_ptr<Gateway> scripted_gateway(std::vector<ScriptEntry> entries);

// Self-play wiring: both lawyer seats on one gateway and one store triple
// (kbs may be null).
CourtroomAgents self_play(const std::shared_ptr<Gateway>& gateway, const KnowledgeBases* kbs,
                          const PromptRegistry& registry);

// The suite's hashing embedder (dim 64, seed 1).
std::shared_ptr<EmbeddingProvider> test_provider();

// Seeds a store triple with two entries per store, ids prefixed by `stem`.
void seed_small_kbs(KnowledgeBases& kbs, const std::string& stem);

// Unique directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string sub(const std::string& name) const;

private:
    std::string path_;
};

}  // namespace agentcourt::testing
