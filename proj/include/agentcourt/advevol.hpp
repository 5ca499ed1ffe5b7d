#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/agents.hpp"
#include "agentcourt/gateway.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/prompts.hpp"

namespace agentcourt {

// Scores for one regulation's courtroom use, 1..10 each.
struct EffectivenessReport {
    int relevance_score = 0;
    int persuasiveness_score = 0;
    int response_effectiveness = 0;
    int overall_effectiveness = 0;
    std::string analysis;
    std::vector<std::string> improvement_suggestions;
};

// Per-trial account of what each store gained.
struct EvolutionReport {
    struct StoreDelta {
        int added = 0;
        int merged = 0;
        int rejected = 0;  // candidate entries dropped for schema violations
    };

    StoreDelta regulations;
    StoreDelta experience;
    StoreDelta cases;
    std::vector<std::string> origins_present;  // experience origins that parsed this pass
    std::vector<std::string> warnings;         // degraded sub-steps

    bool both_origins() const;
    nlohmann::json to_json() const;
};

// Provisions the transcript cites explicitly. Parse failure degrades to an
// empty list with a warning; evolution never aborts on a bad reply.
std::vector<RegulationEntry> extract_direct_regulations(Gateway& gateway,
                                                        const PromptRegistry& registry,
                                                        const TrialTranscript& transcript);

// Provisions the dispute implicates but nobody cited.
std::vector<RegulationEntry> reflect_regulations(Gateway& gateway, const PromptRegistry& registry,
                                                 const TrialTranscript& transcript);

// Union with dedup into the store; incoming batches are folded in canonical
// entry_id order so input order never matters.
EvolutionReport::StoreDelta refine_regulations(RegulationStore& store,
                                               std::vector<RegulationEntry> direct,
                                               std::vector<RegulationEntry> reflect);

// One lawyer's own post-trial reflection. Cardinality violations get one
// corrective retry; nullopt (with a warning) when still invalid.
std::optional<ExperienceEntry> reflect_self_experience(Gateway& gateway,
                                                       const PromptRegistry& registry,
                                                       const AgentProfile& lawyer,
                                                       const TrialTranscript& transcript);

// Learning from the opponent; key_points carries the judge's dispute
// summary. Self-observation is a contract error.
std::optional<ExperienceEntry> observe_opponent(Gateway& gateway, const PromptRegistry& registry,
                                                const AgentProfile& lawyer,
                                                const AgentProfile& opponent,
                                                const TrialTranscript& transcript,
                                                const std::string& key_points);

EvolutionReport::StoreDelta refine_experience(ExperienceStore& store,
                                              std::vector<ExperienceEntry> self_entries,
                                              std::vector<ExperienceEntry> adv_entries);

// Structured precedent summary of the trial. Keywords are deduplicated
// case-insensitively before cardinality validation.
std::optional<CaseEntry> distill_case(Gateway& gateway, const PromptRegistry& registry,
                                      const TrialTranscript& transcript,
                                      const std::string& key_points);

EvolutionReport::StoreDelta refine_case_library(CaseStore& store, CaseEntry entry);

// The full post-trial pass: regulations, both lawyers' experience, case
// library, plus usage-count bumps for every law reference the trial made.
// Requires a verdict; sub-step failures degrade to no-ops in the report.
EvolutionReport evolve(KnowledgeBases& kbs, const TrialTranscript& transcript, Gateway& gateway,
                       const PromptRegistry& registry);

// Scores the listed regulation entries against the transcript and appends
// each overall score to the entry's usage stats. Out-of-range scores are
// clamped into 1..10 with a warning; unparseable replies leave the entry
// unscored.
std::map<std::string, EffectivenessReport> evaluate_effectiveness(
    Gateway& gateway, const PromptRegistry& registry, const TrialTranscript& transcript,
    KnowledgeBases& kbs, const std::vector<std::string>& entry_ids);

}  // namespace agentcourt
