#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentcourt {

enum class CaseCategory { contract, tort, marriage_family, property_rights, labor, other };

const char* case_category_name(CaseCategory category);
CaseCategory case_category_from_name(const std::string& name);

// One civil case seed: the two pleadings plus category metadata.
struct CaseRecord {
    std::string id;
    std::string complaint;
    std::string defense;
    CaseCategory category = CaseCategory::other;
    std::map<std::string, std::string> source_meta;

    // Throws on empty id/complaint/defense.
    void validate() const;
};

enum class Role { judge, clerk, plaintiff_lawyer, defendant_lawyer, plaintiff, defendant };

constexpr Role kAllRoles[] = {Role::judge, Role::clerk, Role::plaintiff_lawyer,
                              Role::defendant_lawyer, Role::plaintiff, Role::defendant};

const char* role_name(Role role);          // "plaintiff_lawyer"
const char* role_display_name(Role role);  // "Plaintiff Lawyer"
Role role_from_name(const std::string& name);
bool is_lawyer(Role role);

enum class CourtPhase {
    announcement = 0,
    opening_verification,
    case_presentation,
    dispute_summary,
    debate,
    judgment,
    archiving,
};

const char* phase_name(CourtPhase phase);
CourtPhase phase_from_name(const std::string& name);
std::optional<CourtPhase> next_phase(CourtPhase phase);

enum class KbKind { law, experience, case_law };

const char* kb_kind_name(KbKind kind);  // "law" / "experience" / "case"
KbKind kb_kind_from_name(const std::string& name);

struct KbRef {
    KbKind kind;
    std::string entry_id;

    bool operator==(const KbRef&) const = default;
};

struct DialogueTurn {
    int index = 0;
    Role speaker = Role::judge;
    CourtPhase phase = CourtPhase::announcement;
    std::string content;
    std::vector<KbRef> retrieved_refs;  // non-empty only for lawyer speakers
    int64_t timestamp = 0;              // logical counter, not wall clock
};

enum class AwardedTo { plaintiff, defendant, mixed, unknown };

const char* awarded_to_name(AwardedTo awarded);
AwardedTo awarded_to_from_name(const std::string& name);

// Keyword heuristic over the judgment prose; defaults to unknown.
AwardedTo parse_awarded_to(const std::string& verdict_text);

struct VerdictRecord {
    std::string text;
    std::vector<std::string> key_disputes;
    AwardedTo awarded_to = AwardedTo::unknown;
};

struct KbFlags {
    bool use_law = true;
    bool use_exp = true;
    bool use_case = true;

    bool enabled(KbKind kind) const;
    bool operator==(const KbFlags&) const = default;
};

// Generation temperature for lawyer argumentation vs. the lower setting used
// for every judging, reflection, and benchmark call.
inline constexpr double kDefaultLawyerTemperature = 0.7;
inline constexpr double kDefaultEvalTemperature = 0.2;

struct TrialConfig {
    int debate_rounds = 3;
    double lawyer_temperature = kDefaultLawyerTemperature;
    double eval_temperature = kDefaultEvalTemperature;
    KbFlags kb_flags;
    int64_t history_token_budget = 8192;
    int64_t random_seed = 0;

    void validate() const;
};

struct TrialTranscript {
    std::string case_id;
    std::vector<DialogueTurn> turns;
    std::optional<VerdictRecord> verdict;
    std::map<Role, std::string> role_assignment;
    TrialConfig config_snapshot;
};

// In-progress trial: frozen case/config plus the transcript built so far.
// Immutable value; operations below return updated copies.
struct TrialContext {
    CaseRecord case_record;
    TrialConfig config;
    std::map<Role, std::string> role_assignment;
    std::vector<DialogueTurn> turns;
    CourtPhase current_phase = CourtPhase::announcement;
    int64_t next_timestamp = 0;
};

// Throws a contract error listing the absent roles when the assignment is
// incomplete. The case must already satisfy CaseRecord invariants.
TrialContext new_trial_context(const CaseRecord& case_record, const TrialConfig& config,
                               const std::map<Role, std::string>& assignment);

// Appends one turn. The turn's phase must match the context's current phase
// and its index must equal the current turn count.
TrialContext append_turn(TrialContext ctx, DialogueTurn turn);

// One line per turn, most recent retained under the token budget. Whole
// oldest turns are dropped first; "[earlier turns elided: N]" leads when
// anything was dropped.
std::string render_history(const std::vector<DialogueTurn>& turns, int64_t token_budget);
std::string render_history(const TrialContext& ctx, int64_t token_budget);
std::string render_turn_line(const DialogueTurn& turn);

// Canonical trial/1 JSON (sorted keys, UTF-8).
nlohmann::json transcript_to_json(const TrialTranscript& transcript);
TrialTranscript transcript_from_json(const nlohmann::json& doc);

}  // namespace agentcourt
