#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentcourt/gateway.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/prompts.hpp"

namespace agentcourt {

// Role identity handed to every prompt as the {role_desc} binding. The
// description is the full "You are ..." sentence.
struct AgentProfile {
    Role role = Role::judge;
    std::string description;
};

AgentProfile default_profile(Role role);

// Which knowledge sources the lawyer asked for this turn.
struct InformationNeeds {
    bool experience = false;
    bool case_precedent = false;
    bool legal = false;

    bool any() const { return experience || case_precedent || legal; }
    bool operator==(const InformationNeeds&) const = default;
};

// Retrieval results grouped per store, plus the query each store was asked.
struct RetrievedBundle {
    std::vector<RetrievedItem> law;
    std::vector<RetrievedItem> experience;
    std::vector<RetrievedItem> cases;
    std::map<std::string, std::string> queries;  // kb kind wire name -> query text

    bool empty() const { return law.empty() && experience.empty() && cases.empty(); }

    // Reference list in canonical kind order (law, experience, case), each
    // kind in rank order.
    std::vector<KbRef> refs() const;
};

// Prompt block for {retrieved_block}; "[no retrieved references]" when empty.
std::string render_retrieved_block(const RetrievedBundle& bundle);

// Planning step. A reply that fails structured parsing twice degrades to
// all-false with a warning instead of aborting the trial.
InformationNeeds plan_information_needs(Gateway& gateway, const PromptRegistry& registry,
                                        const AgentProfile& profile, const std::string& history,
                                        double temperature);

// Query formulation for one store kind. Parse failure falls back to
// `fallback_query` (the engine passes the opponent's last turn).
std::string formulate_query(Gateway& gateway, const PromptRegistry& registry,
                            const AgentProfile& profile, const std::string& history, KbKind kind,
                            const std::string& fallback_query, double temperature);

std::string lawyer_respond(Gateway& gateway, const PromptRegistry& registry,
                           const AgentProfile& profile, const std::string& history,
                           const std::string& case_background, const RetrievedBundle& bundle,
                           double temperature);

std::string judge_open_session(Gateway& gateway, const PromptRegistry& registry,
                               const AgentProfile& profile, const std::string& history,
                               const std::string& case_background, double temperature);

std::string judge_summarize_dispute(Gateway& gateway, const PromptRegistry& registry,
                                    const AgentProfile& profile, const std::string& history,
                                    double temperature);

// Verdict text from the judge; key_disputes carried over from the dispute
// summary, winner parsed by keyword.
VerdictRecord judge_render_verdict(Gateway& gateway, const PromptRegistry& registry,
                                   const AgentProfile& profile, const std::string& history,
                                   const std::string& dispute_summary, double temperature);

// Clerk and litigant turns: no retrieval, template picked by role and phase.
std::string auxiliary_respond(Gateway& gateway, const PromptRegistry& registry,
                              const AgentProfile& profile, CourtPhase phase,
                              const std::string& history, const CaseRecord& case_record,
                              double temperature);

}  // namespace agentcourt
