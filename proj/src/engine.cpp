#include "agentcourt/engine.hpp"

#include <algorithm>

#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

void CourtroomAgents::validate() const {
    if (!registry) throw Error(ErrorKind::config, "courtroom agents need a prompt registry");
    if (!plaintiff_lawyer.gateway || !defendant_lawyer.gateway || !support.gateway)
        throw Error(ErrorKind::config, "all courtroom gateways must be bound");
    if (plaintiff_lawyer.profile.role != Role::plaintiff_lawyer ||
        defendant_lawyer.profile.role != Role::defendant_lawyer)
        throw Error(ErrorKind::config, "lawyer bindings carry mismatched roles");
    if (plaintiff_lawyer.agent_id.empty() || defendant_lawyer.agent_id.empty())
        throw Error(ErrorKind::config, "lawyer bindings need agent ids");
}

TrialError::TrialError(ErrorKind kind, CourtPhase phase, Role role, int turn_index,
                       const std::string& message)
    : Error(kind, std::string("phase=") + phase_name(phase) + " role=" + role_name(role) +
                      " turn=" + std::to_string(turn_index) + ": " + message),
      phase_(phase),
      role_(role),
      turn_index_(turn_index) {}

int TrialState::turns_in_phase() const {
    int count = 0;
    for (const auto& turn : ctx.turns)
        if (turn.phase == ctx.current_phase) ++count;
    return count;
}

int TrialState::debate_round() const {
    if (ctx.current_phase != CourtPhase::debate) return 0;
    return turns_in_phase() / 2;
}

Role select_agent(const TrialState& state) {
    if (state.complete) throw Error(ErrorKind::contract, "select_agent after trial completion");
    const int in_phase = state.turns_in_phase();
    switch (state.phase()) {
        case CourtPhase::announcement: return Role::clerk;
        case CourtPhase::opening_verification: return Role::judge;
        case CourtPhase::case_presentation:
            return in_phase == 0 ? Role::plaintiff_lawyer : Role::defendant_lawyer;
        case CourtPhase::dispute_summary: return Role::judge;
        case CourtPhase::debate:
            return in_phase % 2 == 0 ? Role::plaintiff_lawyer : Role::defendant_lawyer;
        case CourtPhase::judgment: return Role::judge;
        case CourtPhase::archiving: return Role::clerk;
    }
    throw Error(ErrorKind::contract, "unknown phase");
}

namespace {

int required_turns(const TrialState& state) {
    switch (state.phase()) {
        case CourtPhase::announcement: return 1;
        case CourtPhase::opening_verification: return 1;
        case CourtPhase::case_presentation: return 2;
        case CourtPhase::dispute_summary: return 1;
        case CourtPhase::debate: return 2 * state.ctx.config.debate_rounds;
        case CourtPhase::judgment: return 1;
        case CourtPhase::archiving: return 1;
    }
    return 0;
}

}  // namespace

bool phase_turns_complete(const TrialState& state) {
    return state.turns_in_phase() >= required_turns(state);
}

TrialState advance_phase(TrialState state) {
    if (!phase_turns_complete(state)) {
        const Role missing = select_agent(state);
        throw Error(ErrorKind::premature_advance,
                    std::string("phase ") + phase_name(state.phase()) + " still awaits a turn by " +
                        role_name(missing));
    }
    auto successor = next_phase(state.phase());
    if (!successor) {
        state.complete = true;
        return state;
    }
    state.ctx.current_phase = *successor;
    return state;
}

bool first_lawyer_takes_plaintiff(int64_t seed, const std::string& case_id) {
    const std::string key = case_id + "#" + std::to_string(seed);
    return (fnv1a64(key) & 1) == 0;
}

namespace {

struct LawyerTurnOutput {
    std::string content;
    std::vector<KbRef> refs;
};

const DialogueTurn* last_turn_by(const TrialContext& ctx, Role role) {
    for (auto it = ctx.turns.rbegin(); it != ctx.turns.rend(); ++it)
        if (it->speaker == role) return &*it;
    return nullptr;
}

// The full lawyer pipeline: plan which stores to consult, formulate one
// query per selected store, retrieve, respond over the bundle.
LawyerTurnOutput lawyer_turn(const LawyerBinding& binding, const PromptRegistry& registry,
                             const TrialContext& ctx) {
    const TrialConfig& config = ctx.config;
    const std::string history = render_history(ctx, config.history_token_budget);
    const bool any_kb_enabled =
        config.kb_flags.use_law || config.kb_flags.use_exp || config.kb_flags.use_case;

    RetrievedBundle bundle;
    if (binding.kbs && any_kb_enabled) {
        InformationNeeds needs = plan_information_needs(*binding.gateway, registry, binding.profile,
                                                        history, config.lawyer_temperature);
        const Role opponent = binding.profile.role == Role::plaintiff_lawyer
                                  ? Role::defendant_lawyer
                                  : Role::plaintiff_lawyer;
        const DialogueTurn* opposing = last_turn_by(ctx, opponent);
        const std::string fallback =
            opposing ? opposing->content
                     : (binding.profile.role == Role::plaintiff_lawyer ? ctx.case_record.complaint
                                                                       : ctx.case_record.defense);
        // Consultation order mirrors the planning triple: experience, case,
        // legal. A store is consulted only when planned, enabled, and
        // non-empty (querying an empty store would waste a call).
        struct Step {
            bool wanted;
            bool enabled;
            KbKind kind;
        };
        const Step steps[] = {
            {needs.experience, config.kb_flags.use_exp, KbKind::experience},
            {needs.case_precedent, config.kb_flags.use_case, KbKind::case_law},
            {needs.legal, config.kb_flags.use_law, KbKind::law},
        };
        for (const auto& step : steps) {
            if (!step.wanted || !step.enabled || binding.kbs->empty(step.kind)) continue;
            std::string query = formulate_query(*binding.gateway, registry, binding.profile,
                                                history, step.kind, fallback,
                                                config.lawyer_temperature);
            auto items = binding.kbs->retrieve(step.kind, query, kDefaultRetrievalK);
            bundle.queries[kb_kind_name(step.kind)] = std::move(query);
            switch (step.kind) {
                case KbKind::law: bundle.law = std::move(items); break;
                case KbKind::experience: bundle.experience = std::move(items); break;
                case KbKind::case_law: bundle.cases = std::move(items); break;
            }
        }
    }

    const std::string background = binding.profile.role == Role::plaintiff_lawyer
                                       ? ctx.case_record.complaint
                                       : ctx.case_record.defense;
    LawyerTurnOutput out;
    out.refs = bundle.refs();
    out.content = lawyer_respond(*binding.gateway, registry, binding.profile, history, background,
                                 bundle, config.lawyer_temperature);
    return out;
}

}  // namespace

TrialTranscript run_trial(const CaseRecord& case_record, const CourtroomAgents& agents,
                          const TrialConfig& config) {
    agents.validate();
    case_record.validate();
    config.validate();
    const PromptRegistry& registry = *agents.registry;

    std::map<Role, std::string> assignment = {
        {Role::judge, agents.support.agent_id},
        {Role::clerk, agents.support.agent_id},
        {Role::plaintiff_lawyer, agents.plaintiff_lawyer.agent_id},
        {Role::defendant_lawyer, agents.defendant_lawyer.agent_id},
        {Role::plaintiff, agents.support.agent_id},
        {Role::defendant, agents.support.agent_id},
    };

    TrialState state{new_trial_context(case_record, config, assignment)};
    const AgentProfile judge = default_profile(Role::judge);
    const AgentProfile clerk = default_profile(Role::clerk);
    std::optional<VerdictRecord> verdict;
    std::string dispute_summary;

    while (!state.complete) {
        const Role speaker = select_agent(state);
        const CourtPhase phase = state.phase();
        const int index = static_cast<int>(state.ctx.turns.size());
        DialogueTurn turn;
        turn.index = index;
        turn.speaker = speaker;
        turn.phase = phase;
        try {
            const std::string history = render_history(state.ctx, config.history_token_budget);
            switch (phase) {
                case CourtPhase::announcement:
                case CourtPhase::archiving:
                    turn.content = auxiliary_respond(*agents.support.gateway, registry, clerk,
                                                     phase, history, case_record,
                                                     config.lawyer_temperature);
                    break;
                case CourtPhase::opening_verification:
                    turn.content =
                        judge_open_session(*agents.support.gateway, registry, judge, history,
                                           case_record.complaint, config.lawyer_temperature);
                    break;
                case CourtPhase::case_presentation:
                case CourtPhase::debate: {
                    const LawyerBinding& binding = speaker == Role::plaintiff_lawyer
                                                       ? agents.plaintiff_lawyer
                                                       : agents.defendant_lawyer;
                    LawyerTurnOutput out = lawyer_turn(binding, registry, state.ctx);
                    turn.content = std::move(out.content);
                    turn.retrieved_refs = std::move(out.refs);
                    break;
                }
                case CourtPhase::dispute_summary:
                    turn.content = judge_summarize_dispute(*agents.support.gateway, registry, judge,
                                                           history, config.lawyer_temperature);
                    dispute_summary = turn.content;
                    break;
                case CourtPhase::judgment: {
                    VerdictRecord record =
                        judge_render_verdict(*agents.support.gateway, registry, judge, history,
                                             dispute_summary, config.lawyer_temperature);
                    turn.content = record.text;
                    verdict = std::move(record);
                    break;
                }
            }
        } catch (const TrialError&) {
            throw;
        } catch (const Error& e) {
            throw TrialError(e.kind(), phase, speaker, index, e.what());
        }
        state.ctx = append_turn(std::move(state.ctx), std::move(turn));
        if (phase_turns_complete(state)) state = advance_phase(std::move(state));
    }

    TrialTranscript transcript;
    transcript.case_id = case_record.id;
    transcript.turns = state.ctx.turns;
    transcript.verdict = std::move(verdict);
    transcript.role_assignment = std::move(assignment);
    transcript.config_snapshot = config;
    return transcript;
}

}  // namespace agentcourt
