#include "support/fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "agentcourt/errors.hpp"

namespace fs = std::filesystem;

namespace agentcourt::testing {

namespace {

std::string bol(int index) { return "B/L-772-" + std::to_string(index + 1); }

ScriptEntry entry(std::string match, std::string reply) {
    return {std::move(match), std::move(reply)};
}

ScriptEntry json_entry(std::string match, const nlohmann::json& reply) {
    return {std::move(match), reply.dump()};
}

}  // namespace

CaseRecord cargo_case() { return cargo_case_variant(0); }

CaseRecord cargo_case_variant(int index) {
    CaseRecord record;
    record.id = "cargo-" + std::to_string(index + 1);
    record.complaint =
        "The plaintiff entrusted the defendant carrier with a consignment of refrigerated fruit "
        "under bill of lading " + bol(index) + ". On arrival at the discharge port the cargo was "
        "spoiled after the vessel's refrigeration unit failed during the voyage. Under Maritime "
        "Law Article 57 the carrier is liable for damage caused by failure to exercise due "
        "diligence, and the plaintiff claims USD 27,509.40 in damages plus interest.";
    record.defense =
        "The defendant denies the claim under bill of lading " + bol(index) + ". The "
        "refrigeration unit was serviced before the voyage and ran within range except one brief "
        "alarm. The spoilage resulted from the shipper delivering the fruit above the required "
        "pre-cooling temperature, and the claimed amount double-counts a freight refund already "
        "credited to the plaintiff.";
    record.category = CaseCategory::contract;
    return record;
}

std::string plan_none_json() {
    return R"({"experience": false, "case": false, "legal": false})";
}

std::vector<ScriptEntry> trial_script(int index) {
    const std::string n = std::to_string(index + 1);
    std::vector<ScriptEntry> script;

    script.push_back(entry("announce/clerk",
                           "All rise. The court is now in session for case cargo-" + n +
                               ". Courtroom discipline shall be observed: no recordings, no "
                               "interruptions. The session is declared open."));
    script.push_back(entry("opening/judge",
                           "The court has verified the identities and litigation qualifications "
                           "of all participants in case cargo-" + n +
                               ". Both attorneys may proceed with their statements."));

    script.push_back(entry("plan/plaintiff_lawyer", plan_none_json()));
    script.push_back(entry("respond/plaintiff_lawyer",
                           "The plaintiff contracted the defendant to carry refrigerated fruit "
                           "under bill of lading " + bol(index) +
                               ". The cargo arrived spoiled because the vessel's refrigeration "
                               "unit failed at sea. Under Maritime Law Article 57 the carrier is "
                               "liable for cargo damage absent proof of due diligence, and we "
                               "claim USD 27,509.40 in damages."));
    script.push_back(entry("plan/defendant_lawyer", plan_none_json()));
    script.push_back(entry("respond/defendant_lawyer",
                           "The defense denies liability. The temperature logs show the unit was "
                           "maintained and the spoilage stemmed from improper pre-cooling by the "
                           "shipper before loading. The claimed amount is also inflated relative "
                           "to the invoice value of the condemned pallets."));

    script.push_back(entry("summary/judge",
                           "Based on the statements of both attorneys, the key points for debate "
                           "are: 1. Whether the cargo spoilage was caused by the carrier's "
                           "failure to maintain the refrigeration unit. 2. Whether the claimed "
                           "damages of USD 27,509.40 reflect the actual loss."));

    const char* debate[6] = {
        "Regarding the first dispute, the surveyor's report records a refrigeration alarm on day "
        "three of the voyage which the crew left unattended for eleven hours. That delay, not "
        "pre-cooling, caused the spoilage.",
        "The same alarm log shows the unit resumed normal operation within the watch. The pulp "
        "temperature at loading already exceeded the carriage instructions, which is the "
        "shipper's responsibility, not the carrier's.",
        "Even if the loading temperature was marginal, the statute places the burden on the "
        "carrier to prove due diligence in maintaining the unit, and no pre-voyage maintenance "
        "records for the refrigeration plant were produced.",
        "Maintenance records were produced as exhibit D-4 and show a full service two weeks "
        "before departure. Separately, the damages calculation double-counts the freight refund "
        "already credited.",
        "Exhibit D-4 covers the container chassis, not the refrigeration plant itself. The claim "
        "of USD 27,509.40 is net of the freight refund, as the adjuster's worksheet shows line "
        "by line.",
        "That worksheet was prepared by the plaintiff's own adjuster without a joint survey. At "
        "most the proven loss is the invoice value of the two pallets actually condemned.",
    };
    for (int round = 0; round < 3; ++round) {
        script.push_back(entry("plan/plaintiff_lawyer", plan_none_json()));
        script.push_back(entry("respond/plaintiff_lawyer", debate[2 * round]));
        script.push_back(entry("plan/defendant_lawyer", plan_none_json()));
        script.push_back(entry("respond/defendant_lawyer", debate[2 * round + 1]));
    }

    script.push_back(entry("verdict/judge",
                           "Having reviewed the evidence and the debate, the court finds that "
                           "the carrier failed to prove due diligence in maintaining the "
                           "refrigeration unit of " + bol(index) +
                               ". The claim is supported and the court grants the plaintiff USD "
                               "27,509.40 in damages."));
    script.push_back(entry("archive/clerk",
                           "The clerk has completed the trial records for archiving in case "
                           "cargo-" + n + ". The session is closed and the file is sealed."));
    return script;
}

std::vector<ScriptEntry> evolution_script(int index) {
    const std::string n = std::to_string(index + 1);
    const std::string article = std::to_string(57 + index);
    const std::string reflected = std::to_string(113 + index);
    std::vector<ScriptEntry> script;

    script.push_back(json_entry(
        "law_extract",
        {{"laws",
          {{{"source", "plaintiff attorney citation"},
            {"content", "Maritime Law Article " + article +
                            ": The carrier is liable for loss of or damage to goods caused by "
                            "failure to exercise due diligence in maintaining the vessel and its "
                            "refrigeration plant."},
            {"purpose", "Allocates liability for cargo damage to the carrier absent proof of due "
                        "diligence"},
            {"issue", "carrier liability for spoiled refrigerated cargo"}}}}}));
    script.push_back(json_entry(
        "law_reflect",
        {{"laws",
          {{{"content", "Contract Law Article " + reflected +
                            ": A party failing to perform contractual obligations shall "
                            "compensate losses that were foreseeable at the time of "
                            "contracting."},
            {"purpose", "Bounds recoverable damages by foreseeability at contracting"},
            {"issue", "measure of damages for breach"}}}}}));

    script.push_back(json_entry(
        "exp_self/plaintiff_lawyer",
        {{"context", "Freight damage claim " + n + " over spoiled refrigerated cargo"},
         {"content", "Anchoring case " + n +
                         " on the carrier's statutory burden of proof kept opposing counsel "
                         "reacting to our framing through every debate round."},
         {"focus_points",
          {"statutory burden of proof", "alarm timeline", "damages netting"}},
         {"guidelines",
          {"Open with the burden allocation before any facts",
           "Tie each exhibit back to the alarm timeline",
           "Pre-empt double-counting objections inside the damages math"}}}));
    script.push_back(json_entry(
        "exp_self/defendant_lawyer",
        {{"context", "Defending carriage claim " + n + " on causation and quantum"},
         {"content", "Attacking the provenance of the adjuster worksheet in case " + n +
                         " created durable doubt about the damages quantum even after the "
                         "liability point weakened."},
         {"focus_points", {"joint survey", "loading temperature", "worksheet provenance"}},
         {"guidelines",
          {"Split causation from quantum early",
           "Demand joint inspection evidence for every damages figure",
           "Concede small facts to protect the decisive ones"}}}));
    script.push_back(json_entry(
        "exp_opponent/plaintiff_lawyer",
        {{"context", "Observed defense technique in trial " + n},
         {"content", "In trial " + n +
                         " the defense converted our own exhibits into support by reading their "
                         "unchallenged margins; future briefs must state each exhibit's limits "
                         "up front."},
         {"focus_points", {"exhibit scope", "margin notes", "pre-briefing"}},
         {"guidelines",
          {"State the scope of every exhibit when introducing it",
           "Anticipate reverse readings of routine records",
           "Keep rebuttal authority ready for reinterpreted documents"}}}));
    script.push_back(json_entry(
        "exp_opponent/defendant_lawyer",
        {{"context", "Observed plaintiff technique in trial " + n},
         {"content", "Opposing counsel in trial " + n +
                         " escalated from one statute to a burden-shifting framework and made "
                         "the tribunal ask us for disproof; countering needs our own burden "
                         "narrative from the first response."},
         {"focus_points", {"burden shifting", "statutory framing", "first response"}},
         {"guidelines",
          {"Answer framework with framework, not facts alone",
           "Name the opponent's burden theory explicitly",
           "Offer the tribunal an alternative test immediately"}}}));

    script.push_back(json_entry(
        "case_distill",
        {{"content", "Reefer cargo spoilage dispute " + n +
                         ": shipper claimed carrier liability after a refrigeration failure; "
                         "carrier blamed pre-cooling; judgment followed the statutory burden of "
                         "proof on due diligence."},
         {"case_type", "contract dispute"},
         {"keywords", {"maritime carriage " + n, "refrigerated cargo", "burden of proof"}},
         {"quick_reaction_points",
          {"Check alarm and watch logs first", "Verify which unit the maintenance records cover",
           "Net damages against freight refunds"}},
         {"response_directions",
          {"Frame liability around the due diligence burden",
           "Challenge unilateral survey evidence", "Tie damages to the condemned quantity"}}}));
    return script;
}

std::vector<ScriptEntry> retrieval_trial_script(int index) {
    auto base = trial_script(index);
    const std::string plan_all = R"({"experience": true, "case": true, "legal": true})";
    std::vector<ScriptEntry> script;
    for (auto& item : base) {
        if (item.match.rfind("plan/", 0) == 0) {
            const std::string role = item.match.substr(5);
            script.push_back(entry(item.match, plan_all));
            script.push_back(json_entry("query_experience/" + role,
                                        {{"query", "countering reinterpreted exhibit evidence"}}));
            script.push_back(json_entry("query_case/" + role,
                                        {{"query", "refrigerated cargo spoilage precedent"}}));
            script.push_back(json_entry("query_legal/" + role,
                                        {{"query", "carrier due diligence refrigeration"}}));
        } else {
            script.push_back(std::move(item));
        }
    }
    return script;
}

std::vector<ScriptEntry> concat(std::vector<std::vector<ScriptEntry>> parts) {
    std::vector<ScriptEntry> all;
    for (auto& part : parts)
        for (auto& item : part) all.push_back(std::move(item));
    return all;
}

void write_script_file(const std::vector<ScriptEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write script file '" + path + "'");
    for (const auto& item : entries)
        out << nlohmann::json{{"match", item.match}, {"reply", item.reply}}.dump() << "\n";
}

std::shared_ptr<Gateway> scripted_gateway(std::vector<ScriptEntry> entries) {
    return std::make_shared<Gateway>(std::make_shared<ScriptedBackend>(std::move(entries)));
}

CourtroomAgents self_play(const std::shared_ptr<Gateway>& gateway, const KnowledgeBases* kbs,
                          const PromptRegistry& registry) {
    CourtroomAgents agents;
    agents.registry = &registry;
    agents.support = {"support", gateway};
    agents.plaintiff_lawyer = {"lawyer-1", default_profile(Role::plaintiff_lawyer), gateway, kbs};
    agents.defendant_lawyer = {"lawyer-2", default_profile(Role::defendant_lawyer), gateway, kbs};
    return agents;
}

std::shared_ptr<EmbeddingProvider> test_provider() {
    return std::make_shared<HashingEmbedder>(64, 1);
}

void seed_small_kbs(KnowledgeBases& kbs, const std::string& stem) {
    // The pairs are deliberately dissimilar sentences; near-identical texts
    // would dedup into one entry and break the two-per-store premise.
    RegulationEntry regulation1;
    regulation1.content = stem + " regulation 1: carriers shall keep refrigeration machinery in "
                                 "working order fit for the agreed carriage temperature.";
    regulation1.purpose = "maintenance duty";
    regulation1.issue = "equipment upkeep";
    kbs.regulations().insert(regulation1);

    RegulationEntry regulation2;
    regulation2.content = stem + " regulation 2: a consignee must give written notice of visible "
                                 "damage at delivery or the goods are presumed received as "
                                 "described.";
    regulation2.purpose = "notice of claims";
    regulation2.issue = "delivery acceptance";
    kbs.regulations().insert(regulation2);

    ExperienceEntry experience1;
    experience1.context = stem + " context 1";
    experience1.content = stem + " experience 1: lead with the statutory duty before disputing "
                                 "individual log entries so the tribunal frames the facts around "
                                 "obligations.";
    experience1.focus_points = {"duty first", "log entries", "framing"};
    experience1.guidelines = {"State the duty", "Sequence the logs", "Close on the frame"};
    kbs.experience().insert(experience1);

    ExperienceEntry experience2;
    experience2.context = stem + " context 2";
    experience2.content = stem + " experience 2: pin the opposing expert to the survey figures "
                                 "early, because later qualifications read as retreat once "
                                 "numbers are on the record.";
    experience2.focus_points = {"expert testimony", "survey figures", "commitment"};
    experience2.guidelines = {"Fix the numbers first", "Ask narrow follow-ups",
                              "Quote the transcript back"};
    kbs.experience().insert(experience2);

    CaseEntry precedent1;
    precedent1.content = stem + " precedent 1: a carrier was held liable for thawed goods when "
                                "watch logs showed an ignored temperature alarm.";
    precedent1.case_type = "contract dispute";
    precedent1.keywords = {"alarm", "watch log", "thawed goods"};
    precedent1.quick_reaction_points = {"Pull the watch log", "Time the alarm",
                                        "Check crew response"};
    precedent1.response_directions = {"Argue ignored alarms show negligence",
                                      "Compare response times", "Cite the holding"};
    kbs.cases().insert(precedent1);

    CaseEntry precedent2;
    precedent2.content = stem + " precedent 2: a claim failed where the consignee moved the "
                                "cargo into an unrefrigerated warehouse before any survey took "
                                "place.";
    precedent2.case_type = "contract dispute";
    precedent2.keywords = {"mitigation", "warehouse", "survey timing"};
    precedent2.quick_reaction_points = {"Fix the unloading timeline", "Locate the first survey",
                                        "Check storage conditions"};
    precedent2.response_directions = {"Argue the loss arose after delivery",
                                      "Challenge the survey basis", "Shift the burden"};
    kbs.cases().insert(precedent2);
}

TempDir::TempDir(const std::string& prefix) {
    static std::mt19937_64 rng(std::random_device{}());
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::ostringstream name;
        name << "agentcourt-" << prefix << "-" << std::hex << rng();
        fs::path candidate = fs::temp_directory_path() / name.str();
        std::error_code ec;
        if (fs::create_directory(candidate, ec)) {
            path_ = candidate.string();
            return;
        }
    }
    throw Error(ErrorKind::io, "cannot create temp directory for prefix '" + prefix + "'");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::sub(const std::string& name) const {
    return (fs::path(path_) / name).string();
}

}  // namespace agentcourt::testing
