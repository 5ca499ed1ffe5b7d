#include "agentcourt/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "agentcourt/agents.hpp"
#include "agentcourt/errors.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

namespace {

std::string fmt_fixed(double value, int places) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", places, value);
    return buf;
}

const std::map<std::string, std::string>& plot_labels() {
    static const std::map<std::string, std::string> labels = {
        {"cognitive_agility", "CA"},
        {"professional_knowledge", "PK"},
        {"logical_rigor", "LR"},
    };
    return labels;
}

}  // namespace

int verdict_dimension(const DimensionVerdict& verdict, const std::string& name) {
    if (name == "cognitive_agility") return verdict.cognitive_agility;
    if (name == "professional_knowledge") return verdict.professional_knowledge;
    if (name == "logical_rigor") return verdict.logical_rigor;
    if (name == "overall") return verdict.overall;
    throw Error(ErrorKind::contract, "unknown verdict dimension '" + name + "'");
}

DimensionVerdict judge_debate(const TrialTranscript& transcript, Gateway& gateway,
                              const PromptRegistry& registry) {
    if (!transcript.verdict)
        throw Error(ErrorKind::contract,
                    "transcript '" + transcript.case_id + "' is incomplete; cannot judge");
    const auto& tpl = registry.at("eval.debate");
    ChatRequest request;
    request.messages = {{MsgRole::user,
                         registry.render("eval.debate",
                                         {{"court_history",
                                           render_history(transcript.turns,
                                                          transcript.config_snapshot
                                                              .history_token_budget)}})}};
    request.temperature = transcript.config_snapshot.eval_temperature;
    request.tag = "debate_eval/" + transcript.case_id;

    DimensionVerdict verdict;
    try {
        nlohmann::json reply = gateway.complete_structured(request, *tpl.spec);
        verdict.cognitive_agility = reply.at("cognitive_agility").get<int>();
        verdict.professional_knowledge = reply.at("professional_knowledge").get<int>();
        verdict.logical_rigor = reply.at("logical_rigor").get<int>();
        verdict.overall = reply.at("overall").get<int>();
    } catch (const StructuredParseError& e) {
        logging::warn("eval", std::string("judge verdict unusable, recording ties: ") + e.what());
        verdict = {};
        verdict.invalid = true;
    }
    return verdict;
}

int orient_for_a(int value, const SideMap& sides) {
    return sides.a_is_plaintiff ? value : -value;
}

PairwiseResult run_pairwise(const std::vector<CaseRecord>& cases, const CaseRunner& run_case,
                            Gateway& judge_gateway, const PromptRegistry& registry,
                            bool role_swap, int parallelism) {
    if (!run_case) throw Error(ErrorKind::contract, "run_pairwise needs a case runner");
    struct WorkItem {
        const CaseRecord* record;
        bool a_is_plaintiff;
    };
    std::vector<WorkItem> work;
    for (const auto& record : cases) {
        work.push_back({&record, true});
        if (role_swap) work.push_back({&record, false});
    }

    struct Slot {
        std::optional<JudgedTrial> judged;
        std::optional<PairwiseFailure> failure;
    };
    std::vector<Slot> slots(work.size());
    parallel_for_index(work.size(), parallelism, [&](size_t i) {
        const auto& item = work[i];
        try {
            TrialTranscript transcript = run_case(*item.record, item.a_is_plaintiff);
            DimensionVerdict verdict = judge_debate(transcript, judge_gateway, registry);
            slots[i].judged =
                JudgedTrial{std::move(transcript), verdict, {item.record->id, item.a_is_plaintiff}};
        } catch (const std::exception& e) {
            logging::warn("eval", "trial for case '" + item.record->id + "' failed: " + e.what());
            slots[i].failure = PairwiseFailure{item.record->id, item.a_is_plaintiff, e.what()};
        }
    });

    PairwiseResult result;
    for (auto& slot : slots) {
        if (slot.judged) result.judged.push_back(std::move(*slot.judged));
        if (slot.failure) result.failures.push_back(std::move(*slot.failure));
    }
    return result;
}

WinRateReport aggregate_winrates(const std::vector<JudgedTrial>& judged) {
    WinRateReport report;
    for (const auto& trial : judged)
        trial.verdict.invalid ? ++report.invalid_count : ++report.valid_count;
    if (report.valid_count == 0)
        throw Error(ErrorKind::empty_input, "no valid verdicts to aggregate");

    for (const auto& name : verdict_dimension_names()) {
        RatePercentages rates;
        for (const auto& trial : judged) {
            if (trial.verdict.invalid) continue;
            const int oriented = orient_for_a(verdict_dimension(trial.verdict, name), trial.sides);
            if (oriented > 0)
                ++rates.wins;
            else if (oriented < 0)
                ++rates.losses;
            else
                ++rates.ties;
        }
        const double n = static_cast<double>(report.valid_count);
        rates.win = round_half_up(100.0 * rates.wins / n, 1);
        rates.tie = round_half_up(100.0 * rates.ties / n, 1);
        rates.loss = round_half_up(100.0 * rates.losses / n, 1);
        report.dimensions[name] = rates;
    }
    return report;
}

nlohmann::json WinRateReport::to_json() const {
    nlohmann::json dims = nlohmann::json::object();
    for (const auto& [name, rates] : dimensions)
        dims[name] = {{"win_percent", rates.win},   {"tie_percent", rates.tie},
                      {"loss_percent", rates.loss}, {"wins", rates.wins},
                      {"ties", rates.ties},         {"losses", rates.losses}};
    return {{"schema", "winrates/1"},
            {"valid_verdicts", valid_count},
            {"invalid_verdicts", invalid_count},
            {"dimensions", dims}};
}

std::string WinRateReport::to_csv() const {
    std::ostringstream out;
    out << "dimension,win_percent,tie_percent,loss_percent,wins,ties,losses\n";
    for (const auto& name : verdict_dimension_names()) {
        auto it = dimensions.find(name);
        if (it == dimensions.end()) continue;
        const auto& r = it->second;
        out << name << ',' << fmt_fixed(r.win, 1) << ',' << fmt_fixed(r.tie, 1) << ','
            << fmt_fixed(r.loss, 1) << ',' << r.wins << ',' << r.ties << ',' << r.losses << "\n";
    }
    return out.str();
}

std::string WinRateReport::to_plot_csv() const {
    std::ostringstream out;
    out << "dimension,outcome,percent\n";
    for (const auto& name : verdict_dimension_names()) {
        auto label = plot_labels().find(name);
        if (label == plot_labels().end()) continue;  // overall stays out of the plot
        auto it = dimensions.find(name);
        if (it == dimensions.end()) continue;
        out << label->second << ",win," << fmt_fixed(it->second.win, 1) << "\n";
        out << label->second << ",tie," << fmt_fixed(it->second.tie, 1) << "\n";
        out << label->second << ",loss," << fmt_fixed(it->second.loss, 1) << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Multiple-choice benchmark
// ---------------------------------------------------------------------------

void BenchQuestion::validate() const {
    if (id.empty()) throw Error(ErrorKind::contract, "benchmark question without id");
    if (question.empty()) throw Error(ErrorKind::contract, "question '" + id + "' has empty text");
    static const std::vector<std::string> expected = {"A", "B", "C", "D"};
    if (options.size() != 4)
        throw Error(ErrorKind::contract, "question '" + id + "' needs exactly four options");
    std::set<std::string> texts;
    for (size_t i = 0; i < options.size(); ++i) {
        if (options[i].label != expected[i])
            throw Error(ErrorKind::contract,
                        "question '" + id + "' option labels must run A-D in order");
        if (options[i].text.empty())
            throw Error(ErrorKind::contract, "question '" + id + "' has an empty option");
        if (!texts.insert(options[i].text).second)
            throw Error(ErrorKind::contract, "question '" + id + "' has duplicate options");
    }
    if (std::find(expected.begin(), expected.end(), gold) == expected.end())
        throw Error(ErrorKind::contract, "question '" + id + "' gold label '" + gold +
                                             "' is not an option label");
}

nlohmann::json BenchQuestion::to_json() const {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& option : options) opts.push_back({{"label", option.label}, {"text", option.text}});
    return {{"schema", "bench/1"},  {"id", id},
            {"background", background}, {"court_process", court_process},
            {"focus", focus},           {"question", question},
            {"options", opts},          {"gold", gold}};
}

BenchQuestion BenchQuestion::from_json(const nlohmann::json& doc) {
    const std::string schema = doc.value("schema", "bench/1");
    if (schema != "bench/1")
        throw Error(ErrorKind::unsupported_version, "benchmark schema '" + schema + "'");
    BenchQuestion question;
    question.id = doc.at("id").get<std::string>();
    question.background = doc.value("background", "");
    question.court_process = doc.value("court_process", "");
    question.focus = doc.value("focus", "");
    question.question = doc.at("question").get<std::string>();
    for (const auto& option : doc.at("options"))
        question.options.push_back(
            {option.at("label").get<std::string>(), option.at("text").get<std::string>()});
    question.gold = doc.at("gold").get<std::string>();
    question.validate();
    return question;
}

std::vector<BenchQuestion> load_bench_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open benchmark file '" + path + "'");
    std::vector<BenchQuestion> questions;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw Error(ErrorKind::io, path + ":" + std::to_string(line_no) + ": not a JSON object");
        questions.push_back(BenchQuestion::from_json(doc));
    }
    return questions;
}

const char* bench_mode_name(BenchMode mode) {
    return mode == BenchMode::enhanced ? "enhanced" : "base";
}

BenchMode bench_mode_from_name(const std::string& name) {
    if (name == "base") return BenchMode::base;
    if (name == "enhanced") return BenchMode::enhanced;
    throw Error(ErrorKind::config, "unknown benchmark mode '" + name + "'");
}

std::optional<std::string> extract_option_letter(const std::string& reply) {
    std::set<char> seen;
    size_t i = 0;
    while (i < reply.size()) {
        if (!std::isalnum(static_cast<unsigned char>(reply[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < reply.size() && std::isalnum(static_cast<unsigned char>(reply[i]))) ++i;
        if (i - start == 1) {
            const char upper =
                static_cast<char>(std::toupper(static_cast<unsigned char>(reply[start])));
            if (upper >= 'A' && upper <= 'D') seen.insert(upper);
        }
    }
    if (seen.size() != 1) return std::nullopt;
    return std::string(1, *seen.begin());
}

BenchAnswer answer_mcq(const BenchQuestion& question, Gateway& gateway,
                       const PromptRegistry& registry, BenchMode mode, const KnowledgeBases* kbs,
                       double temperature) {
    question.validate();
    std::ostringstream options;
    for (const auto& option : question.options) options << option.label << ". " << option.text << "\n";

    std::map<std::string, std::string> bindings = {
        {"background", question.background},
        {"court_process", question.court_process},
        {"focus", question.focus},
        {"question", question.question},
        {"options", trim(options.str())},
    };
    std::string template_id = "bench.base";
    if (mode == BenchMode::enhanced) {
        if (!kbs)
            throw Error(ErrorKind::contract, "enhanced benchmark mode needs knowledge bases");
        const std::string query = question.focus + " " + question.question;
        RetrievedBundle bundle;
        bundle.law = kbs->retrieve(KbKind::law, query, kDefaultRetrievalK);
        bundle.experience = kbs->retrieve(KbKind::experience, query, kDefaultRetrievalK);
        bundle.cases = kbs->retrieve(KbKind::case_law, query, kDefaultRetrievalK);
        bindings["reference"] = render_retrieved_block(bundle);
        template_id = "bench.enhanced";
    }

    ChatRequest request;
    request.messages = {{MsgRole::user, registry.render(template_id, bindings)}};
    request.temperature = temperature;
    request.tag = "bench/" + question.id;

    BenchAnswer answer;
    answer.question_id = question.id;
    std::string reply;
    try {
        reply = gateway.complete(request).content;
    } catch (const GatewayError& e) {
        answer.note = std::string("gateway failure: ") + e.what();
        logging::warn("eval", "question '" + question.id + "' abstained: " + answer.note);
        return answer;
    }
    if (auto letter = extract_option_letter(reply)) {
        answer.predicted = *letter;
    } else {
        answer.note = "no single option letter in reply";
    }
    return answer;
}

BenchReport score_bench(const std::vector<BenchQuestion>& questions,
                        const std::vector<BenchAnswer>& answers, BenchMode mode) {
    if (questions.size() != answers.size())
        throw Error(ErrorKind::length_mismatch,
                    "scored " + std::to_string(answers.size()) + " answers against " +
                        std::to_string(questions.size()) + " questions");
    if (questions.empty()) throw Error(ErrorKind::empty_input, "no questions to score");

    BenchReport report;
    report.mode = mode;
    for (size_t i = 0; i < questions.size(); ++i) {
        if (!answers[i].question_id.empty() && answers[i].question_id != questions[i].id)
            throw Error(ErrorKind::contract, "answer " + std::to_string(i) + " is for question '" +
                                                 answers[i].question_id + "', expected '" +
                                                 questions[i].id + "'");
        BenchRecord record;
        record.question_id = questions[i].id;
        record.predicted = answers[i].predicted;
        record.gold = questions[i].gold;
        record.correct = !record.predicted.empty() && record.predicted == record.gold;
        if (record.correct) ++report.correct;
        report.records.push_back(std::move(record));
    }
    report.total = static_cast<int64_t>(questions.size());
    report.accuracy_percent =
        round_half_up(100.0 * static_cast<double>(report.correct) / report.total, 2);
    return report;
}

nlohmann::json BenchReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& record : records)
        rows.push_back({{"question_id", record.question_id},
                        {"predicted", record.predicted},
                        {"gold", record.gold},
                        {"correct", record.correct}});
    return {{"schema", "bench-report/1"},
            {"mode", bench_mode_name(mode)},
            {"correct", correct},
            {"total", total},
            {"accuracy_percent", accuracy_percent},
            {"records", rows}};
}

std::string BenchReport::to_csv() const {
    std::ostringstream out;
    out << "question_id,predicted,gold,correct\n";
    for (const auto& record : records)
        out << record.question_id << ',' << record.predicted << ',' << record.gold << ','
            << (record.correct ? 1 : 0) << "\n";
    return out.str();
}

}  // namespace agentcourt
