#include "agentcourt/model.hpp"

#include <algorithm>

#include "agentcourt/errors.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

const char* case_category_name(CaseCategory category) {
    switch (category) {
        case CaseCategory::contract: return "contract";
        case CaseCategory::tort: return "tort";
        case CaseCategory::marriage_family: return "marriage_family";
        case CaseCategory::property_rights: return "property_rights";
        case CaseCategory::labor: return "labor";
        case CaseCategory::other: return "other";
    }
    return "other";
}

CaseCategory case_category_from_name(const std::string& name) {
    if (name == "contract") return CaseCategory::contract;
    if (name == "tort") return CaseCategory::tort;
    if (name == "marriage_family") return CaseCategory::marriage_family;
    if (name == "property_rights") return CaseCategory::property_rights;
    if (name == "labor") return CaseCategory::labor;
    if (name == "other") return CaseCategory::other;
    throw Error(ErrorKind::config, "unknown case category '" + name + "'");
}

void CaseRecord::validate() const {
    if (id.empty()) throw Error(ErrorKind::contract, "case id must be non-empty");
    if (trim(complaint).empty())
        throw Error(ErrorKind::contract, "case " + id + ": complaint must be non-empty");
    if (trim(defense).empty())
        throw Error(ErrorKind::contract, "case " + id + ": defense must be non-empty");
}

const char* role_name(Role role) {
    switch (role) {
        case Role::judge: return "judge";
        case Role::clerk: return "clerk";
        case Role::plaintiff_lawyer: return "plaintiff_lawyer";
        case Role::defendant_lawyer: return "defendant_lawyer";
        case Role::plaintiff: return "plaintiff";
        case Role::defendant: return "defendant";
    }
    return "?";
}

const char* role_display_name(Role role) {
    switch (role) {
        case Role::judge: return "Judge";
        case Role::clerk: return "Clerk";
        case Role::plaintiff_lawyer: return "Plaintiff Lawyer";
        case Role::defendant_lawyer: return "Defendant Lawyer";
        case Role::plaintiff: return "Plaintiff";
        case Role::defendant: return "Defendant";
    }
    return "?";
}

Role role_from_name(const std::string& name) {
    for (Role role : kAllRoles) {
        if (name == role_name(role)) return role;
    }
    throw Error(ErrorKind::config, "unknown role '" + name + "'");
}

bool is_lawyer(Role role) {
    return role == Role::plaintiff_lawyer || role == Role::defendant_lawyer;
}

const char* phase_name(CourtPhase phase) {
    switch (phase) {
        case CourtPhase::announcement: return "announcement";
        case CourtPhase::opening_verification: return "opening_verification";
        case CourtPhase::case_presentation: return "case_presentation";
        case CourtPhase::dispute_summary: return "dispute_summary";
        case CourtPhase::debate: return "debate";
        case CourtPhase::judgment: return "judgment";
        case CourtPhase::archiving: return "archiving";
    }
    return "?";
}

CourtPhase phase_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(CourtPhase::archiving); ++i) {
        auto phase = static_cast<CourtPhase>(i);
        if (name == phase_name(phase)) return phase;
    }
    throw Error(ErrorKind::config, "unknown phase '" + name + "'");
}

std::optional<CourtPhase> next_phase(CourtPhase phase) {
    if (phase == CourtPhase::archiving) return std::nullopt;
    return static_cast<CourtPhase>(static_cast<int>(phase) + 1);
}

const char* kb_kind_name(KbKind kind) {
    switch (kind) {
        case KbKind::law: return "law";
        case KbKind::experience: return "experience";
        case KbKind::case_law: return "case";
    }
    return "?";
}

KbKind kb_kind_from_name(const std::string& name) {
    if (name == "law") return KbKind::law;
    if (name == "experience") return KbKind::experience;
    if (name == "case") return KbKind::case_law;
    throw Error(ErrorKind::config, "unknown kb kind '" + name + "'");
}

const char* awarded_to_name(AwardedTo awarded) {
    switch (awarded) {
        case AwardedTo::plaintiff: return "plaintiff";
        case AwardedTo::defendant: return "defendant";
        case AwardedTo::mixed: return "mixed";
        case AwardedTo::unknown: return "unknown";
    }
    return "unknown";
}

AwardedTo awarded_to_from_name(const std::string& name) {
    if (name == "plaintiff") return AwardedTo::plaintiff;
    if (name == "defendant") return AwardedTo::defendant;
    if (name == "mixed") return AwardedTo::mixed;
    return AwardedTo::unknown;
}

AwardedTo parse_awarded_to(const std::string& verdict_text) {
    const std::string text = to_lower_ascii(verdict_text);
    static const char* plaintiff_phrases[] = {
        "for the plaintiff", "in favor of the plaintiff", "in favour of the plaintiff",
        "plaintiff wins", "plaintiff prevails", "support the plaintiff",
        "supports the plaintiff", "plaintiff's claims are upheld", "grant the plaintiff",
        "grants the plaintiff", "awarded to the plaintiff",
    };
    static const char* defendant_phrases[] = {
        "for the defendant", "in favor of the defendant", "in favour of the defendant",
        "defendant wins", "defendant prevails", "dismiss the plaintiff",
        "dismisses the plaintiff", "claims are dismissed", "reject the plaintiff",
        "rejects the plaintiff", "awarded to the defendant",
    };
    bool plaintiff = std::any_of(std::begin(plaintiff_phrases), std::end(plaintiff_phrases),
                                 [&](const char* p) { return contains(text, p); });
    bool defendant = std::any_of(std::begin(defendant_phrases), std::end(defendant_phrases),
                                 [&](const char* p) { return contains(text, p); });
    if (plaintiff && defendant) return AwardedTo::mixed;
    if (contains(text, "partially") && (plaintiff || defendant)) return AwardedTo::mixed;
    if (plaintiff) return AwardedTo::plaintiff;
    if (defendant) return AwardedTo::defendant;
    return AwardedTo::unknown;
}

bool KbFlags::enabled(KbKind kind) const {
    switch (kind) {
        case KbKind::law: return use_law;
        case KbKind::experience: return use_exp;
        case KbKind::case_law: return use_case;
    }
    return false;
}

void TrialConfig::validate() const {
    if (debate_rounds < 1) throw Error(ErrorKind::config, "debate_rounds must be >= 1");
    if (lawyer_temperature < 0.0 || lawyer_temperature > 2.0)
        throw Error(ErrorKind::config, "lawyer_temperature must be in [0, 2]");
    if (eval_temperature < 0.0 || eval_temperature > 2.0)
        throw Error(ErrorKind::config, "eval_temperature must be in [0, 2]");
    if (history_token_budget < 1) throw Error(ErrorKind::config, "history_token_budget must be positive");
}

TrialContext new_trial_context(const CaseRecord& case_record, const TrialConfig& config,
                               const std::map<Role, std::string>& assignment) {
    case_record.validate();
    config.validate();
    std::vector<std::string> missing;
    for (Role role : kAllRoles) {
        auto it = assignment.find(role);
        if (it == assignment.end() || it->second.empty()) missing.emplace_back(role_name(role));
    }
    if (!missing.empty())
        throw Error(ErrorKind::contract, "role assignment missing: " + join(missing, ", "));

    TrialContext ctx;
    ctx.case_record = case_record;
    ctx.config = config;
    ctx.role_assignment = assignment;
    ctx.current_phase = CourtPhase::announcement;
    return ctx;
}

TrialContext append_turn(TrialContext ctx, DialogueTurn turn) {
    if (turn.phase != ctx.current_phase) {
        throw Error(ErrorKind::phase_mismatch,
                    std::string("turn tagged ") + phase_name(turn.phase) + " but context is in " +
                        phase_name(ctx.current_phase));
    }
    if (turn.index != static_cast<int>(ctx.turns.size())) {
        throw Error(ErrorKind::index_gap, "turn index " + std::to_string(turn.index) +
                                              " does not follow " + std::to_string(ctx.turns.size()) +
                                              " existing turns");
    }
    if (!is_lawyer(turn.speaker) && !turn.retrieved_refs.empty()) {
        throw Error(ErrorKind::contract,
                    std::string("retrieved_refs on non-lawyer speaker ") + role_name(turn.speaker));
    }
    turn.timestamp = ctx.next_timestamp;
    ctx.next_timestamp += 1;
    ctx.turns.push_back(std::move(turn));
    return ctx;
}

std::string render_turn_line(const DialogueTurn& turn) {
    std::string line = "«";
    line += role_display_name(turn.speaker);
    line += "» [";
    line += phase_name(turn.phase);
    line += "]: ";
    line += turn.content;
    return line;
}

std::string render_history(const std::vector<DialogueTurn>& turns, int64_t token_budget) {
    const size_t n = turns.size();
    if (n == 0) return "";

    std::vector<std::string> lines(n);
    std::vector<int64_t> costs(n);
    for (size_t i = 0; i < n; ++i) {
        lines[i] = render_turn_line(turns[i]);
        costs[i] = approx_token_count(lines[i]);
    }

    // Largest suffix of turns whose line costs (plus the elision marker when
    // anything is dropped) fit the budget.
    int64_t total = 0;
    for (int64_t c : costs) total += c;

    size_t keep = n;
    if (total > token_budget) {
        keep = 0;
        int64_t suffix_cost = 0;
        for (size_t m = 1; m < n; ++m) {
            suffix_cost += costs[n - m];
            std::string marker = "[earlier turns elided: " + std::to_string(n - m) + "]";
            if (suffix_cost + approx_token_count(marker) <= token_budget)
                keep = m;
            else
                break;
        }
    }

    std::string out;
    if (keep < n) {
        out += "[earlier turns elided: " + std::to_string(n - keep) + "]\n";
    }
    for (size_t i = n - keep; i < n; ++i) {
        out += lines[i];
        if (i + 1 < n) out += "\n";
    }
    return out;
}

std::string render_history(const TrialContext& ctx, int64_t token_budget) {
    return render_history(ctx.turns, token_budget);
}

namespace {

nlohmann::json refs_to_json(const std::vector<KbRef>& refs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ref : refs) {
        arr.push_back({{"kind", kb_kind_name(ref.kind)}, {"entry_id", ref.entry_id}});
    }
    return arr;
}

nlohmann::json config_to_json(const TrialConfig& config) {
    return {
        {"debate_rounds", config.debate_rounds},
        {"lawyer_temperature", config.lawyer_temperature},
        {"eval_temperature", config.eval_temperature},
        {"kb_flags",
         {{"use_law", config.kb_flags.use_law},
          {"use_exp", config.kb_flags.use_exp},
          {"use_case", config.kb_flags.use_case}}},
        {"history_token_budget", config.history_token_budget},
        {"random_seed", config.random_seed},
    };
}

TrialConfig config_from_json(const nlohmann::json& doc) {
    TrialConfig config;
    config.debate_rounds = doc.at("debate_rounds").get<int>();
    config.lawyer_temperature = doc.at("lawyer_temperature").get<double>();
    config.eval_temperature = doc.at("eval_temperature").get<double>();
    config.kb_flags.use_law = doc.at("kb_flags").at("use_law").get<bool>();
    config.kb_flags.use_exp = doc.at("kb_flags").at("use_exp").get<bool>();
    config.kb_flags.use_case = doc.at("kb_flags").at("use_case").get<bool>();
    config.history_token_budget = doc.at("history_token_budget").get<int64_t>();
    config.random_seed = doc.at("random_seed").get<int64_t>();
    return config;
}

}  // namespace

nlohmann::json transcript_to_json(const TrialTranscript& transcript) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& turn : transcript.turns) {
        turns.push_back({
            {"index", turn.index},
            {"speaker", role_name(turn.speaker)},
            {"phase", phase_name(turn.phase)},
            {"content", turn.content},
            {"retrieved_refs", refs_to_json(turn.retrieved_refs)},
            {"timestamp", turn.timestamp},
        });
    }
    nlohmann::json assignment = nlohmann::json::object();
    for (const auto& [role, agent] : transcript.role_assignment) assignment[role_name(role)] = agent;

    nlohmann::json doc = {
        {"schema", "trial/1"},
        {"case_id", transcript.case_id},
        {"turns", turns},
        {"role_assignment", assignment},
        {"config", config_to_json(transcript.config_snapshot)},
    };
    if (transcript.verdict) {
        doc["verdict"] = {
            {"text", transcript.verdict->text},
            {"key_disputes", transcript.verdict->key_disputes},
            {"awarded_to", awarded_to_name(transcript.verdict->awarded_to)},
        };
    } else {
        doc["verdict"] = nullptr;
    }
    return doc;
}

TrialTranscript transcript_from_json(const nlohmann::json& doc) {
    if (doc.value("schema", "") != "trial/1")
        throw Error(ErrorKind::unsupported_version,
                    "expected schema trial/1, got '" + doc.value("schema", "") + "'");
    TrialTranscript transcript;
    transcript.case_id = doc.at("case_id").get<std::string>();
    for (const auto& jt : doc.at("turns")) {
        DialogueTurn turn;
        turn.index = jt.at("index").get<int>();
        turn.speaker = role_from_name(jt.at("speaker").get<std::string>());
        turn.phase = phase_from_name(jt.at("phase").get<std::string>());
        turn.content = jt.at("content").get<std::string>();
        for (const auto& jr : jt.at("retrieved_refs")) {
            turn.retrieved_refs.push_back(
                {kb_kind_from_name(jr.at("kind").get<std::string>()), jr.at("entry_id").get<std::string>()});
        }
        turn.timestamp = jt.at("timestamp").get<int64_t>();
        transcript.turns.push_back(std::move(turn));
    }
    for (const auto& [name, agent] : doc.at("role_assignment").items()) {
        transcript.role_assignment[role_from_name(name)] = agent.get<std::string>();
    }
    transcript.config_snapshot = config_from_json(doc.at("config"));
    if (!doc.at("verdict").is_null()) {
        VerdictRecord verdict;
        verdict.text = doc.at("verdict").at("text").get<std::string>();
        verdict.key_disputes = doc.at("verdict").at("key_disputes").get<std::vector<std::string>>();
        verdict.awarded_to = awarded_to_from_name(doc.at("verdict").at("awarded_to").get<std::string>());
        transcript.verdict = std::move(verdict);
    }
    return transcript;
}

}  // namespace agentcourt
