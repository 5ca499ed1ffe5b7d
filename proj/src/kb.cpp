#include "agentcourt/kb.hpp"

#include <algorithm>

namespace agentcourt {

const char* regulation_source_name(RegulationSource source) {
    switch (source) {
        case RegulationSource::direct: return "direct";
        case RegulationSource::reflect: return "reflect";
        case RegulationSource::opponent: return "opponent";
    }
    return "direct";
}

RegulationSource regulation_source_from_name(const std::string& name) {
    if (name == "direct") return RegulationSource::direct;
    if (name == "reflect") return RegulationSource::reflect;
    if (name == "opponent") return RegulationSource::opponent;
    throw Error(ErrorKind::contract, "unknown regulation source '" + name + "'");
}

const char* experience_origin_name(ExperienceOrigin origin) {
    return origin == ExperienceOrigin::self ? "self" : "adversarial";
}

ExperienceOrigin experience_origin_from_name(const std::string& name) {
    if (name == "self") return ExperienceOrigin::self;
    if (name == "adversarial") return ExperienceOrigin::adversarial;
    throw Error(ErrorKind::contract, "unknown experience origin '" + name + "'");
}

std::string make_entry_id(KbKind kind, const std::string& content) {
    const char* prefix = "";
    switch (kind) {
        case KbKind::law: prefix = "r-"; break;
        case KbKind::experience: prefix = "e-"; break;
        case KbKind::case_law: prefix = "c-"; break;
    }
    return prefix + hex64(fnv1a64(normalize_content(content)));
}

namespace {

void check_cardinality(const std::vector<std::string>& items, const char* field, const std::string& id) {
    if (items.size() < 3 || items.size() > 5)
        throw Error(ErrorKind::contract, std::string(field) + " of entry '" + id + "' has " +
                                             std::to_string(items.size()) + " items, need 3 to 5");
    for (const auto& item : items)
        if (trim(item).empty())
            throw Error(ErrorKind::contract, std::string(field) + " of entry '" + id + "' has a blank item");
}

void check_non_empty(const std::string& value, const char* field, const std::string& id) {
    if (trim(value).empty())
        throw Error(ErrorKind::contract, std::string(field) + " of entry '" + id + "' is empty");
}

}  // namespace

void validate_entry(const RegulationEntry& entry) {
    check_non_empty(entry.entry_id, "entry_id", entry.entry_id);
    check_non_empty(entry.content, "content", entry.entry_id);
    for (int score : entry.usage.effectiveness_scores)
        if (score < 1 || score > 10)
            throw Error(ErrorKind::contract,
                        "effectiveness score " + std::to_string(score) + " outside 1..10");
}

void validate_entry(const ExperienceEntry& entry) {
    check_non_empty(entry.entry_id, "entry_id", entry.entry_id);
    check_non_empty(entry.content, "content", entry.entry_id);
    check_cardinality(entry.focus_points, "focus_points", entry.entry_id);
    check_cardinality(entry.guidelines, "guidelines", entry.entry_id);
}

void validate_entry(const CaseEntry& entry) {
    check_non_empty(entry.entry_id, "entry_id", entry.entry_id);
    check_non_empty(entry.content, "content", entry.entry_id);
    check_non_empty(entry.case_type, "case_type", entry.entry_id);
    check_cardinality(entry.keywords, "keywords", entry.entry_id);
    check_cardinality(entry.quick_reaction_points, "quick_reaction_points", entry.entry_id);
    check_cardinality(entry.response_directions, "response_directions", entry.entry_id);
}

KbKind entry_kind(const RegulationEntry&) { return KbKind::law; }
KbKind entry_kind(const ExperienceEntry&) { return KbKind::experience; }
KbKind entry_kind(const CaseEntry&) { return KbKind::case_law; }

void merge_entries(RegulationEntry& incumbent, const RegulationEntry& incoming) {
    incumbent.usage.times_retrieved += incoming.usage.times_retrieved;
    incumbent.usage.effectiveness_scores.insert(incumbent.usage.effectiveness_scores.end(),
                                                incoming.usage.effectiveness_scores.begin(),
                                                incoming.usage.effectiveness_scores.end());
    if (incoming.source == RegulationSource::direct) incumbent.source = RegulationSource::direct;
}

void merge_entries(ExperienceEntry& incumbent, const ExperienceEntry& incoming) {
    if (incumbent.origin == incoming.origin && incumbent.merged_origins.empty() &&
        incoming.merged_origins.empty())
        return;
    std::vector<std::string> origins = incumbent.merged_origins;
    origins.push_back(experience_origin_name(incumbent.origin));
    origins.push_back(experience_origin_name(incoming.origin));
    origins.insert(origins.end(), incoming.merged_origins.begin(), incoming.merged_origins.end());
    std::sort(origins.begin(), origins.end());
    origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
    incumbent.merged_origins = std::move(origins);
    // Canonical origin keeps the store order-independent: self outranks
    // adversarial when the same content arrives from both sides.
    if (incoming.origin == ExperienceOrigin::self) incumbent.origin = ExperienceOrigin::self;
}

void merge_entries(CaseEntry&, const CaseEntry&) {}

nlohmann::json entry_to_json(const RegulationEntry& entry) {
    return {
        {"entry_id", entry.entry_id},
        {"content", entry.content},
        {"purpose", entry.purpose},
        {"issue", entry.issue},
        {"source", regulation_source_name(entry.source)},
        {"usage",
         {{"times_retrieved", entry.usage.times_retrieved},
          {"effectiveness_scores", entry.usage.effectiveness_scores}}},
    };
}

nlohmann::json entry_to_json(const ExperienceEntry& entry) {
    return {
        {"entry_id", entry.entry_id},
        {"context", entry.context},
        {"content", entry.content},
        {"focus_points", entry.focus_points},
        {"guidelines", entry.guidelines},
        {"origin", experience_origin_name(entry.origin)},
        {"merged_origins", entry.merged_origins},
    };
}

nlohmann::json entry_to_json(const CaseEntry& entry) {
    return {
        {"entry_id", entry.entry_id},
        {"content", entry.content},
        {"case_type", entry.case_type},
        {"keywords", entry.keywords},
        {"quick_reaction_points", entry.quick_reaction_points},
        {"response_directions", entry.response_directions},
    };
}

void entry_from_json(const nlohmann::json& doc, RegulationEntry& out) {
    out.entry_id = doc.at("entry_id").get<std::string>();
    out.content = doc.at("content").get<std::string>();
    out.purpose = doc.value("purpose", "");
    out.issue = doc.value("issue", "");
    out.source = regulation_source_from_name(doc.at("source").get<std::string>());
    const auto& usage = doc.at("usage");
    out.usage.times_retrieved = usage.at("times_retrieved").get<int64_t>();
    out.usage.effectiveness_scores = usage.at("effectiveness_scores").get<std::vector<int>>();
}

void entry_from_json(const nlohmann::json& doc, ExperienceEntry& out) {
    out.entry_id = doc.at("entry_id").get<std::string>();
    out.context = doc.value("context", "");
    out.content = doc.at("content").get<std::string>();
    out.focus_points = doc.at("focus_points").get<std::vector<std::string>>();
    out.guidelines = doc.at("guidelines").get<std::vector<std::string>>();
    out.origin = experience_origin_from_name(doc.at("origin").get<std::string>());
    out.merged_origins = doc.value("merged_origins", std::vector<std::string>{});
}

void entry_from_json(const nlohmann::json& doc, CaseEntry& out) {
    out.entry_id = doc.at("entry_id").get<std::string>();
    out.content = doc.at("content").get<std::string>();
    out.case_type = doc.at("case_type").get<std::string>();
    out.keywords = doc.at("keywords").get<std::vector<std::string>>();
    out.quick_reaction_points = doc.at("quick_reaction_points").get<std::vector<std::string>>();
    out.response_directions = doc.at("response_directions").get<std::vector<std::string>>();
}

std::string render_entry_text(const RegulationEntry& entry) {
    std::string text = entry.content;
    if (!entry.purpose.empty()) text += "\n  Purpose: " + entry.purpose;
    if (!entry.issue.empty()) text += "\n  Applies to: " + entry.issue;
    return text;
}

std::string render_entry_text(const ExperienceEntry& entry) {
    std::string text = entry.content;
    if (!entry.focus_points.empty()) text += "\n  Focus points: " + join(entry.focus_points, "; ");
    if (!entry.guidelines.empty()) text += "\n  Guidelines: " + join(entry.guidelines, "; ");
    return text;
}

std::string render_entry_text(const CaseEntry& entry) {
    std::string text = entry.content;
    text += "\n  Case type: " + entry.case_type;
    if (!entry.keywords.empty()) text += "\n  Keywords: " + join(entry.keywords, "; ");
    if (!entry.quick_reaction_points.empty())
        text += "\n  Quick reactions: " + join(entry.quick_reaction_points, "; ");
    if (!entry.response_directions.empty())
        text += "\n  Response directions: " + join(entry.response_directions, "; ");
    return text;
}

size_t KnowledgeBases::size(KbKind kind) const {
    switch (kind) {
        case KbKind::law: return regulations_.size();
        case KbKind::experience: return experience_.size();
        case KbKind::case_law: return cases_.size();
    }
    return 0;
}

std::vector<RetrievedItem> KnowledgeBases::retrieve(KbKind kind, const std::string& query,
                                                    size_t k) const {
    switch (kind) {
        case KbKind::law: return regulations_.retrieve(query, k);
        case KbKind::experience: return experience_.retrieve(query, k);
        case KbKind::case_law: return cases_.retrieve(query, k);
    }
    return {};
}

}  // namespace agentcourt
