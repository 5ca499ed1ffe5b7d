#pragma once

#include <memory>
#include <string>

#include "agentcourt/agents.hpp"
#include "agentcourt/gateway.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/prompts.hpp"

namespace agentcourt {

// A lawyer seat: who argues, through which backend, over which knowledge.
// kbs may be null (no retrieval at all, beyond what kb_flags disable).
struct LawyerBinding {
    std::string agent_id;
    AgentProfile profile;
    std::shared_ptr<Gateway> gateway;
    const KnowledgeBases* kbs = nullptr;
};

// Judge, clerk, and litigants share one backend.
struct SupportBinding {
    std::string agent_id = "support";
    std::shared_ptr<Gateway> gateway;
};

struct CourtroomAgents {
    LawyerBinding plaintiff_lawyer;
    LawyerBinding defendant_lawyer;
    SupportBinding support;
    const PromptRegistry* registry = nullptr;

    void validate() const;
};

// Gateway failures surface with trial coordinates attached.
class TrialError : public Error {
public:
    TrialError(ErrorKind kind, CourtPhase phase, Role role, int turn_index,
               const std::string& message);

    CourtPhase phase() const { return phase_; }
    Role role() const { return role_; }
    int turn_index() const { return turn_index_; }

private:
    CourtPhase phase_;
    Role role_;
    int turn_index_;
};

struct TrialState {
    TrialContext ctx;
    bool complete = false;

    CourtPhase phase() const { return ctx.current_phase; }
    // 0-based round while in the debate phase.
    int debate_round() const;
    // Turns spoken within the current phase.
    int turns_in_phase() const;
};

// Next speaker under the fixed schedule: clerk, judge, both lawyer
// presentations, judge summary, alternating debate rounds opened by the
// plaintiff lawyer, judge verdict, clerk archive.
Role select_agent(const TrialState& state);

// True once the current phase has all its required turns.
bool phase_turns_complete(const TrialState& state);

// Moves to the successor phase; archiving completes the trial. Throws a
// premature-advance error naming the missing turn otherwise.
TrialState advance_phase(TrialState state);

// Seeded coin for which lawyer identity takes the plaintiff side of a case.
bool first_lawyer_takes_plaintiff(int64_t seed, const std::string& case_id);

TrialTranscript run_trial(const CaseRecord& case_record, const CourtroomAgents& agents,
                          const TrialConfig& config);

}  // namespace agentcourt
