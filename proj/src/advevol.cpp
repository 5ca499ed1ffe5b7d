#include "agentcourt/advevol.hpp"

#include <algorithm>

#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

namespace {

void require_complete(const TrialTranscript& transcript, const char* op) {
    if (!transcript.verdict)
        throw Error(ErrorKind::contract,
                    std::string(op) + " needs a completed transcript with a verdict");
}

std::string transcript_history(const TrialTranscript& transcript) {
    return render_history(transcript.turns, transcript.config_snapshot.history_token_budget);
}

// The judge's mid-trial synthesis of contested issues.
std::string dispute_key_points(const TrialTranscript& transcript) {
    for (const auto& turn : transcript.turns)
        if (turn.phase == CourtPhase::dispute_summary) return turn.content;
    return "";
}

// Both presentation statements stand in for the raw case background, which
// the transcript does not carry verbatim.
std::string presented_background(const TrialTranscript& transcript) {
    std::string out;
    for (const auto& turn : transcript.turns) {
        if (turn.phase != CourtPhase::case_presentation) continue;
        if (!out.empty()) out += "\n";
        out += render_turn_line(turn);
    }
    return out;
}

ChatRequest make_request(std::string prompt, std::string tag, double temperature) {
    ChatRequest request;
    request.messages.push_back({MsgRole::user, std::move(prompt)});
    request.temperature = temperature;
    request.tag = std::move(tag);
    return request;
}

std::vector<RegulationEntry> parse_law_list(const nlohmann::json& doc, RegulationSource source) {
    std::vector<RegulationEntry> out;
    for (const auto& law : doc.at("laws")) {
        RegulationEntry entry;
        entry.content = trim(law.value("content", ""));
        if (entry.content.empty()) continue;
        entry.purpose = law.value("purpose", "");
        entry.issue = law.value("issue", "");
        entry.source = source;
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<RegulationEntry> law_step(Gateway& gateway, const PromptRegistry& registry,
                                      const TrialTranscript& transcript, const char* template_id,
                                      const char* tag, RegulationSource source) {
    require_complete(transcript, tag);
    const auto& tmpl = registry.at(template_id);
    std::string prompt = registry.render(template_id, {{"court_history", transcript_history(transcript)}});
    try {
        auto doc = gateway.complete_structured(
            make_request(std::move(prompt), tag, transcript.config_snapshot.eval_temperature),
            *tmpl.spec);
        return parse_law_list(doc, source);
    } catch (const StructuredParseError& e) {
        logging::warn("advevol", std::string(tag) + " reply unusable, continuing without it: " + e.what());
        return {};
    }
}

template <typename Entry>
void sort_by_id(std::vector<Entry>& entries) {
    for (auto& entry : entries)
        if (entry.entry_id.empty()) entry.entry_id = make_entry_id(entry_kind(entry), entry.content);
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.entry_id < b.entry_id; });
}

std::optional<ExperienceEntry> experience_step(Gateway& gateway, const PromptRegistry& registry,
                                               const AgentProfile& lawyer,
                                               const TrialTranscript& transcript,
                                               const char* template_id, const std::string& tag,
                                               const std::map<std::string, std::string>& extra_bindings,
                                               ExperienceOrigin origin) {
    const auto& tmpl = registry.at(template_id);
    std::map<std::string, std::string> bindings = extra_bindings;
    bindings["role_desc"] = lawyer.description;
    bindings["court_history"] = transcript_history(transcript);
    std::string prompt = registry.render(template_id, bindings);
    try {
        auto doc = gateway.complete_structured(
            make_request(std::move(prompt), tag, transcript.config_snapshot.eval_temperature),
            *tmpl.spec);
        ExperienceEntry entry;
        entry.context = doc.at("context").get<std::string>();
        entry.content = doc.at("content").get<std::string>();
        entry.focus_points = doc.at("focus_points").get<std::vector<std::string>>();
        entry.guidelines = doc.at("guidelines").get<std::vector<std::string>>();
        entry.origin = origin;
        return entry;
    } catch (const StructuredParseError& e) {
        logging::warn("advevol", tag + " entry rejected: " + e.what());
        return std::nullopt;
    }
}

void dedup_case_insensitive(std::vector<std::string>& items) {
    std::vector<std::string> seen;
    std::vector<std::string> out;
    for (auto& item : items) {
        std::string folded = to_lower_ascii(trim(item));
        if (std::find(seen.begin(), seen.end(), folded) != seen.end()) continue;
        seen.push_back(std::move(folded));
        out.push_back(std::move(item));
    }
    items = std::move(out);
}

std::string check_list_size(const nlohmann::json& value, const char* name) {
    if (value.size() < 3 || value.size() > 5)
        return std::string("key '") + name + "' must have 3-5 items, got " +
               std::to_string(value.size());
    return "";
}

}  // namespace

bool EvolutionReport::both_origins() const {
    const bool self = std::find(origins_present.begin(), origins_present.end(), "self") !=
                      origins_present.end();
    const bool adv = std::find(origins_present.begin(), origins_present.end(), "adversarial") !=
                     origins_present.end();
    return self && adv;
}

nlohmann::json EvolutionReport::to_json() const {
    auto delta = [](const StoreDelta& d) {
        return nlohmann::json{{"added", d.added}, {"merged", d.merged}, {"rejected", d.rejected}};
    };
    return {
        {"regulations", delta(regulations)},
        {"experience", delta(experience)},
        {"cases", delta(cases)},
        {"origins_present", origins_present},
        {"warnings", warnings},
    };
}

std::vector<RegulationEntry> extract_direct_regulations(Gateway& gateway,
                                                        const PromptRegistry& registry,
                                                        const TrialTranscript& transcript) {
    return law_step(gateway, registry, transcript, "evolve.law.extract", "law_extract",
                    RegulationSource::direct);
}

std::vector<RegulationEntry> reflect_regulations(Gateway& gateway, const PromptRegistry& registry,
                                                 const TrialTranscript& transcript) {
    return law_step(gateway, registry, transcript, "evolve.law.reflect", "law_reflect",
                    RegulationSource::reflect);
}

EvolutionReport::StoreDelta refine_regulations(RegulationStore& store,
                                               std::vector<RegulationEntry> direct,
                                               std::vector<RegulationEntry> reflect) {
    EvolutionReport::StoreDelta delta;
    sort_by_id(direct);
    sort_by_id(reflect);
    auto fold = [&](std::vector<RegulationEntry>& batch) {
        for (auto& entry : batch) {
            try {
                if (store.insert(std::move(entry)) == InsertOutcome::added)
                    ++delta.added;
                else
                    ++delta.merged;
            } catch (const Error& e) {
                ++delta.rejected;
                logging::warn("advevol", std::string("regulation entry rejected: ") + e.what());
            }
        }
    };
    fold(direct);
    fold(reflect);
    return delta;
}

std::optional<ExperienceEntry> reflect_self_experience(Gateway& gateway,
                                                       const PromptRegistry& registry,
                                                       const AgentProfile& lawyer,
                                                       const TrialTranscript& transcript) {
    require_complete(transcript, "reflect_self_experience");
    if (!is_lawyer(lawyer.role))
        throw Error(ErrorKind::contract, "self reflection is a lawyer step");
    return experience_step(gateway, registry, lawyer, transcript, "evolve.experience.self",
                           std::string("exp_self/") + role_name(lawyer.role),
                           {{"case_background", presented_background(transcript)}},
                           ExperienceOrigin::self);
}

std::optional<ExperienceEntry> observe_opponent(Gateway& gateway, const PromptRegistry& registry,
                                                const AgentProfile& lawyer,
                                                const AgentProfile& opponent,
                                                const TrialTranscript& transcript,
                                                const std::string& key_points) {
    require_complete(transcript, "observe_opponent");
    if (!is_lawyer(lawyer.role) || !is_lawyer(opponent.role))
        throw Error(ErrorKind::contract, "opponent observation is a lawyer step");
    if (lawyer.role == opponent.role)
        throw Error(ErrorKind::contract, "an agent cannot observe itself as opponent");
    return experience_step(gateway, registry, lawyer, transcript, "evolve.experience.opponent",
                           std::string("exp_opponent/") + role_name(lawyer.role),
                           {{"key_points", key_points}}, ExperienceOrigin::adversarial);
}

EvolutionReport::StoreDelta refine_experience(ExperienceStore& store,
                                              std::vector<ExperienceEntry> self_entries,
                                              std::vector<ExperienceEntry> adv_entries) {
    EvolutionReport::StoreDelta delta;
    sort_by_id(self_entries);
    sort_by_id(adv_entries);
    auto fold = [&](std::vector<ExperienceEntry>& batch) {
        for (auto& entry : batch) {
            try {
                if (store.insert(std::move(entry)) == InsertOutcome::added)
                    ++delta.added;
                else
                    ++delta.merged;
            } catch (const Error& e) {
                ++delta.rejected;
                logging::warn("advevol", std::string("experience entry rejected: ") + e.what());
            }
        }
    };
    fold(self_entries);
    fold(adv_entries);
    return delta;
}

std::optional<CaseEntry> distill_case(Gateway& gateway, const PromptRegistry& registry,
                                      const TrialTranscript& transcript,
                                      const std::string& key_points) {
    require_complete(transcript, "distill_case");
    const auto& tmpl = registry.at("evolve.case.distill");
    std::string prompt =
        registry.render("evolve.case.distill", {{"key_points", key_points},
                                                {"court_history", transcript_history(transcript)}});
    auto normalize = [](nlohmann::json& doc) -> std::string {
        auto keywords = doc.at("keywords").get<std::vector<std::string>>();
        dedup_case_insensitive(keywords);
        doc["keywords"] = keywords;
        if (auto v = check_list_size(doc.at("keywords"), "keywords"); !v.empty()) return v;
        if (auto v = check_list_size(doc.at("quick_reaction_points"), "quick_reaction_points");
            !v.empty())
            return v;
        return check_list_size(doc.at("response_directions"), "response_directions");
    };
    try {
        auto doc = gateway.complete_structured(
            make_request(std::move(prompt), "case_distill", transcript.config_snapshot.eval_temperature),
            *tmpl.spec, normalize);
        CaseEntry entry;
        entry.content = doc.at("content").get<std::string>();
        entry.case_type = doc.at("case_type").get<std::string>();
        entry.keywords = doc.at("keywords").get<std::vector<std::string>>();
        entry.quick_reaction_points = doc.at("quick_reaction_points").get<std::vector<std::string>>();
        entry.response_directions = doc.at("response_directions").get<std::vector<std::string>>();
        return entry;
    } catch (const StructuredParseError& e) {
        logging::warn("advevol", std::string("case distillation rejected: ") + e.what());
        return std::nullopt;
    }
}

EvolutionReport::StoreDelta refine_case_library(CaseStore& store, CaseEntry entry) {
    EvolutionReport::StoreDelta delta;
    try {
        if (store.insert(std::move(entry)) == InsertOutcome::added)
            ++delta.added;
        else
            ++delta.merged;
    } catch (const Error& e) {
        ++delta.rejected;
        logging::warn("advevol", std::string("case entry rejected: ") + e.what());
    }
    return delta;
}

EvolutionReport evolve(KnowledgeBases& kbs, const TrialTranscript& transcript, Gateway& gateway,
                       const PromptRegistry& registry) {
    require_complete(transcript, "evolve");
    EvolutionReport report;

    // Usage accounting for the trial that just ended: every law reference a
    // lawyer turn retrieved counts one use of that provision.
    for (const auto& turn : transcript.turns) {
        for (const auto& ref : turn.retrieved_refs) {
            if (ref.kind != KbKind::law) continue;
            if (RegulationEntry* entry = kbs.regulations().find_mutable(ref.entry_id))
                ++entry->usage.times_retrieved;
        }
    }

    auto direct = extract_direct_regulations(gateway, registry, transcript);
    auto reflect = reflect_regulations(gateway, registry, transcript);
    if (direct.empty() && reflect.empty())
        report.warnings.push_back("no regulation candidates this trial");
    report.regulations = refine_regulations(kbs.regulations(), std::move(direct), std::move(reflect));

    const std::string key_points = dispute_key_points(transcript);
    const AgentProfile plaintiff = default_profile(Role::plaintiff_lawyer);
    const AgentProfile defendant = default_profile(Role::defendant_lawyer);
    std::vector<ExperienceEntry> self_entries;
    std::vector<ExperienceEntry> adv_entries;
    for (const AgentProfile* lawyer : {&plaintiff, &defendant}) {
        if (auto entry = reflect_self_experience(gateway, registry, *lawyer, transcript))
            self_entries.push_back(std::move(*entry));
        else
            report.warnings.push_back(std::string("self reflection rejected for ") +
                                      role_name(lawyer->role));
    }
    for (const auto& [lawyer, opponent] :
         {std::pair{&plaintiff, &defendant}, std::pair{&defendant, &plaintiff}}) {
        if (auto entry = observe_opponent(gateway, registry, *lawyer, *opponent, transcript, key_points))
            adv_entries.push_back(std::move(*entry));
        else
            report.warnings.push_back(std::string("opponent observation rejected for ") +
                                      role_name(lawyer->role));
    }
    if (!self_entries.empty()) report.origins_present.push_back("self");
    if (!adv_entries.empty()) report.origins_present.push_back("adversarial");
    report.experience =
        refine_experience(kbs.experience(), std::move(self_entries), std::move(adv_entries));

    if (auto entry = distill_case(gateway, registry, transcript, key_points))
        report.cases = refine_case_library(kbs.cases(), std::move(*entry));
    else
        report.warnings.push_back("case distillation rejected");

    return report;
}

std::map<std::string, EffectivenessReport> evaluate_effectiveness(
    Gateway& gateway, const PromptRegistry& registry, const TrialTranscript& transcript,
    KnowledgeBases& kbs, const std::vector<std::string>& entry_ids) {
    require_complete(transcript, "evaluate_effectiveness");
    const auto& tmpl = registry.at("evolve.law.effectiveness");
    std::map<std::string, EffectivenessReport> out;
    const std::string history = transcript_history(transcript);
    for (const auto& id : entry_ids) {
        RegulationEntry* entry = kbs.regulations().find_mutable(id);
        if (!entry) {
            logging::warn("advevol", "no regulation entry '" + id + "' to score");
            continue;
        }
        std::string prompt = registry.render(
            "evolve.law.effectiveness",
            {{"entry_text", render_entry_text(*entry)}, {"court_history", history}});
        nlohmann::json doc;
        try {
            doc = gateway.complete_structured(
                make_request(std::move(prompt), "law_effectiveness",
                             transcript.config_snapshot.eval_temperature),
                *tmpl.spec);
        } catch (const StructuredParseError& e) {
            logging::warn("advevol", "entry '" + id + "' left unscored: " + e.what());
            continue;
        }
        auto clamp_score = [&](const char* key) {
            int value = doc.at(key).get<int>();
            if (value < 1 || value > 10) {
                const int clamped = std::clamp(value, 1, 10);
                logging::warn("advevol", std::string(key) + "=" + std::to_string(value) +
                                             " outside 1..10, clamped to " + std::to_string(clamped));
                return clamped;
            }
            return value;
        };
        EffectivenessReport score;
        score.relevance_score = clamp_score("relevance_score");
        score.persuasiveness_score = clamp_score("persuasiveness_score");
        score.response_effectiveness = clamp_score("response_effectiveness");
        score.overall_effectiveness = clamp_score("overall_effectiveness");
        score.analysis = doc.value("analysis", "");
        score.improvement_suggestions = doc.value("improvement_suggestions", std::vector<std::string>{});
        entry->usage.effectiveness_scores.push_back(score.overall_effectiveness);
        out.emplace(id, std::move(score));
    }
    return out;
}

}  // namespace agentcourt
