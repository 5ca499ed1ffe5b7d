#include "agentcourt/agents.hpp"

#include <sstream>

#include "agentcourt/errors.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

AgentProfile default_profile(Role role) {
    switch (role) {
        case Role::judge:
            return {role,
                    "You are the presiding judge in this case, responsible for conducting the "
                    "trial, ensuring procedural fairness, and raising questions when necessary."};
        case Role::clerk:
            return {role,
                    "You are the court clerk, responsible for managing procedural progression "
                    "and maintaining the trial records."};
        case Role::plaintiff_lawyer:
            return {role,
                    "You are the plaintiff's attorney in this case, representing the "
                    "plaintiff's interests with professional legal expertise."};
        case Role::defendant_lawyer:
            return {role,
                    "You are the defendant's attorney in this case, representing the "
                    "defendant's interests with professional legal expertise."};
        case Role::plaintiff:
            return {role, "You are the plaintiff in this case, stating your claims truthfully "
                          "in your own words."};
        case Role::defendant:
            return {role, "You are the defendant in this case, stating your defense truthfully "
                          "in your own words."};
    }
    throw Error(ErrorKind::contract, "unknown role");
}

std::vector<KbRef> RetrievedBundle::refs() const {
    std::vector<KbRef> out;
    for (const auto& item : law) out.push_back({KbKind::law, item.entry_id});
    for (const auto& item : experience) out.push_back({KbKind::experience, item.entry_id});
    for (const auto& item : cases) out.push_back({KbKind::case_law, item.entry_id});
    return out;
}

std::string render_retrieved_block(const RetrievedBundle& bundle) {
    if (bundle.empty()) return "[no retrieved references]";
    std::ostringstream out;
    auto emit = [&](const char* heading, const std::vector<RetrievedItem>& items) {
        if (items.empty()) return;
        out << heading << "\n";
        for (const auto& item : items) out << "- " << item.text << "\n";
    };
    emit("Legal provisions:", bundle.law);
    emit("Experience notes:", bundle.experience);
    emit("Case references:", bundle.cases);
    std::string text = out.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

namespace {

ChatRequest make_request(std::string prompt, std::string tag, double temperature) {
    ChatRequest request;
    request.messages.push_back({MsgRole::user, std::move(prompt)});
    request.temperature = temperature;
    request.tag = std::move(tag);
    return request;
}

std::string role_tag(const char* op, const AgentProfile& profile) {
    return std::string(op) + "/" + role_name(profile.role);
}

}  // namespace

InformationNeeds plan_information_needs(Gateway& gateway, const PromptRegistry& registry,
                                        const AgentProfile& profile, const std::string& history,
                                        double temperature) {
    const auto& tmpl = registry.at("lawyer.plan");
    std::string prompt = registry.render(
        "lawyer.plan", {{"role_desc", profile.description}, {"court_history", history}});
    try {
        auto doc = gateway.complete_structured(
            make_request(std::move(prompt), role_tag("plan", profile), temperature), *tmpl.spec);
        return {doc.at("experience").get<bool>(), doc.at("case").get<bool>(),
                doc.at("legal").get<bool>()};
    } catch (const StructuredParseError& e) {
        logging::warn("agents", "planning reply unusable for " +
                                    std::string(role_name(profile.role)) +
                                    ", retrieving nothing: " + e.what());
        return {};
    }
}

std::string formulate_query(Gateway& gateway, const PromptRegistry& registry,
                            const AgentProfile& profile, const std::string& history, KbKind kind,
                            const std::string& fallback_query, double temperature) {
    const char* tmpl_id = "lawyer.query.legal";
    const char* op = "query_legal";
    if (kind == KbKind::experience) {
        tmpl_id = "lawyer.query.experience";
        op = "query_experience";
    } else if (kind == KbKind::case_law) {
        tmpl_id = "lawyer.query.case";
        op = "query_case";
    }
    const auto& tmpl = registry.at(tmpl_id);
    std::string prompt =
        registry.render(tmpl_id, {{"role_desc", profile.description}, {"court_history", history}});
    try {
        auto doc = gateway.complete_structured(
            make_request(std::move(prompt), role_tag(op, profile), temperature), *tmpl.spec);
        return doc.at("query").get<std::string>();
    } catch (const StructuredParseError& e) {
        logging::warn("agents", std::string("query reply unusable for ") + kb_kind_name(kind) +
                                    ", falling back to opponent turn: " + e.what());
        return fallback_query;
    }
}

std::string lawyer_respond(Gateway& gateway, const PromptRegistry& registry,
                           const AgentProfile& profile, const std::string& history,
                           const std::string& case_background, const RetrievedBundle& bundle,
                           double temperature) {
    std::string prompt = registry.render("lawyer.respond",
                                         {{"role_desc", profile.description},
                                          {"court_history", history},
                                          {"case_background", case_background},
                                          {"retrieved_block", render_retrieved_block(bundle)}});
    return gateway.complete(make_request(std::move(prompt), role_tag("respond", profile), temperature))
        .content;
}

std::string judge_open_session(Gateway& gateway, const PromptRegistry& registry,
                               const AgentProfile& profile, const std::string& history,
                               const std::string& case_background, double temperature) {
    std::string prompt = registry.render("judge.opening", {{"role_desc", profile.description},
                                                           {"court_history", history},
                                                           {"case_background", case_background}});
    return gateway.complete(make_request(std::move(prompt), role_tag("opening", profile), temperature))
        .content;
}

std::string judge_summarize_dispute(Gateway& gateway, const PromptRegistry& registry,
                                    const AgentProfile& profile, const std::string& history,
                                    double temperature) {
    std::string prompt = registry.render(
        "judge.summary", {{"role_desc", profile.description}, {"court_history", history}});
    return gateway.complete(make_request(std::move(prompt), role_tag("summary", profile), temperature))
        .content;
}

namespace {

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string trimmed = trim(line);
        if (!trimmed.empty()) out.push_back(std::move(trimmed));
    }
    return out;
}

}  // namespace

VerdictRecord judge_render_verdict(Gateway& gateway, const PromptRegistry& registry,
                                   const AgentProfile& profile, const std::string& history,
                                   const std::string& dispute_summary, double temperature) {
    std::string prompt = registry.render(
        "judge.verdict", {{"role_desc", profile.description}, {"court_history", history}});
    std::string text =
        gateway.complete(make_request(std::move(prompt), role_tag("verdict", profile), temperature))
            .content;
    VerdictRecord verdict;
    verdict.text = text;
    verdict.key_disputes = nonempty_lines(dispute_summary);
    verdict.awarded_to = parse_awarded_to(text);
    return verdict;
}

std::string auxiliary_respond(Gateway& gateway, const PromptRegistry& registry,
                              const AgentProfile& profile, CourtPhase phase,
                              const std::string& history, const CaseRecord& case_record,
                              double temperature) {
    std::string tmpl_id;
    std::map<std::string, std::string> bindings = {{"role_desc", profile.description}};
    const char* op = "statement";
    switch (profile.role) {
        case Role::clerk:
            if (phase == CourtPhase::announcement) {
                tmpl_id = "clerk.announce";
                op = "announce";
                bindings["case_background"] = case_record.complaint;
            } else {
                tmpl_id = "clerk.archive";
                op = "archive";
                bindings["court_history"] = history;
            }
            break;
        case Role::plaintiff:
            tmpl_id = "litigant.plaintiff";
            bindings["complaint"] = case_record.complaint;
            break;
        case Role::defendant:
            tmpl_id = "litigant.defendant";
            bindings["defense"] = case_record.defense;
            break;
        default:
            throw Error(ErrorKind::contract, std::string("auxiliary_respond does not cover role ") +
                                                 role_name(profile.role));
    }
    std::string prompt = registry.render(tmpl_id, bindings);
    return gateway.complete(make_request(std::move(prompt), role_tag(op, profile), temperature))
        .content;
}

}  // namespace agentcourt
