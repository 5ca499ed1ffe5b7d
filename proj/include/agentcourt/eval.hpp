#pragma once

// Two evaluation tracks. Pairwise debate judging scores a finished trial on
// three dimensions plus an overall call, oriented so 1 means the plaintiff
// side won; role-swapped runs are re-oriented through a side map before
// aggregation. The benchmark track answers four-option multiple-choice
// questions, optionally enriched with knowledge-base retrieval, and scores
// exact accuracy.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/gateway.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"
#include "agentcourt/prompts.hpp"

namespace agentcourt {

struct DimensionVerdict {
    int cognitive_agility = 0;
    int professional_knowledge = 0;
    int logical_rigor = 0;
    int overall = 0;
    // Set when the judge reply could not be parsed; the verdict is recorded
    // as all ties and excluded from win-rate denominators.
    bool invalid = false;
};

// Which compared system argued each side of one judged trial.
struct SideMap {
    std::string case_id;
    bool a_is_plaintiff = true;
};

struct JudgedTrial {
    TrialTranscript transcript;
    DimensionVerdict verdict;
    SideMap sides;
};

struct PairwiseFailure {
    std::string case_id;
    bool a_is_plaintiff = true;
    std::string message;
};

struct PairwiseResult {
    std::vector<JudgedTrial> judged;
    std::vector<PairwiseFailure> failures;
};

// Win/tie/loss percentages for system A in one dimension, half-up to one
// decimal over valid verdicts only.
struct RatePercentages {
    double win = 0.0;
    double tie = 0.0;
    double loss = 0.0;
    int64_t wins = 0;
    int64_t ties = 0;
    int64_t losses = 0;
};

struct WinRateReport {
    std::map<std::string, RatePercentages> dimensions;  // keyed by dimension name
    int64_t valid_count = 0;
    int64_t invalid_count = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
    // Long-form rows (dimension, outcome, percent) for plotting grouped bars.
    std::string to_plot_csv() const;
};

inline const std::vector<std::string>& verdict_dimension_names() {
    static const std::vector<std::string> names = {
        "cognitive_agility", "professional_knowledge", "logical_rigor", "overall"};
    return names;
}

int verdict_dimension(const DimensionVerdict& verdict, const std::string& name);

// Scores a finished trial; judging runs at the transcript's eval temperature.
// An unusable judge reply yields an all-ties verdict flagged invalid.
DimensionVerdict judge_debate(const TrialTranscript& transcript, Gateway& gateway,
                              const PromptRegistry& registry);

// Maps a plaintiff-oriented dimension value to system A's outcome through the
// side map: +1 A-win, 0 tie, -1 A-loss. Applying the same map twice is the
// identity.
int orient_for_a(int value, const SideMap& sides);

// Runs each case through `run_case(case, a_is_plaintiff)` and judges the
// transcript; with role_swap every case runs twice with sides exchanged.
// Per-trial failures are recorded and the run continues. Trials are
// independent work items; parallelism bounds concurrent ones, and results
// come back in case order regardless.
using CaseRunner = std::function<TrialTranscript(const CaseRecord&, bool a_is_plaintiff)>;
PairwiseResult run_pairwise(const std::vector<CaseRecord>& cases, const CaseRunner& run_case,
                            Gateway& judge_gateway, const PromptRegistry& registry,
                            bool role_swap, int parallelism = 1);

// Folds judged trials into per-dimension win/tie/loss rates for system A.
// Requires at least one valid verdict.
WinRateReport aggregate_winrates(const std::vector<JudgedTrial>& judged);

// ---------------------------------------------------------------------------
// Multiple-choice benchmark
// ---------------------------------------------------------------------------

struct BenchOption {
    std::string label;  // "A".."D"
    std::string text;
};

struct BenchQuestion {
    std::string id;
    std::string background;
    std::string court_process;
    std::string focus;
    std::string question;
    std::vector<BenchOption> options;  // exactly four, labeled A-D
    std::string gold;                  // one of the option labels

    void validate() const;
    nlohmann::json to_json() const;
    static BenchQuestion from_json(const nlohmann::json& doc);
};

std::vector<BenchQuestion> load_bench_jsonl(const std::string& path);

enum class BenchMode { base, enhanced };
const char* bench_mode_name(BenchMode mode);
BenchMode bench_mode_from_name(const std::string& name);

// One answered question; empty `predicted` is an abstention and scores as
// incorrect.
struct BenchAnswer {
    std::string question_id;
    std::string predicted;
    std::string note;  // failure detail when the gateway or extraction gave up
};

struct BenchRecord {
    std::string question_id;
    std::string predicted;
    std::string gold;
    bool correct = false;
};

struct BenchReport {
    std::vector<BenchRecord> records;
    int64_t correct = 0;
    int64_t total = 0;
    double accuracy_percent = 0.0;  // half-up to two decimals
    BenchMode mode = BenchMode::base;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// Scans a reply for standalone A-D tokens, case-insensitively; exactly one
// distinct letter resolves the answer, anything else is an abstention.
std::optional<std::string> extract_option_letter(const std::string& reply);

// Asks one question at the evaluation temperature. Enhanced mode requires
// knowledge bases and injects up to three retrieved entries per store as the
// reference block, queried with "focus question".
BenchAnswer answer_mcq(const BenchQuestion& question, Gateway& gateway,
                       const PromptRegistry& registry, BenchMode mode,
                       const KnowledgeBases* kbs = nullptr,
                       double temperature = kDefaultEvalTemperature);

// Grades aligned question/answer lists into a report.
BenchReport score_bench(const std::vector<BenchQuestion>& questions,
                        const std::vector<BenchAnswer>& answers, BenchMode mode);

}  // namespace agentcourt
