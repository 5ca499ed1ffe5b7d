#include "agentcourt/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "agentcourt/advevol.hpp"
#include "agentcourt/embedding.hpp"
#include "agentcourt/engine.hpp"
#include "agentcourt/errors.hpp"
#include "agentcourt/eval.hpp"
#include "agentcourt/gateway.hpp"
#include "agentcourt/ingest.hpp"
#include "agentcourt/kb.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/persistence.hpp"
#include "agentcourt/prompts.hpp"
#include "agentcourt/util.hpp"

namespace fs = std::filesystem;

namespace agentcourt {

namespace {

std::string env_api_key() {
    const char* key = std::getenv("AGENTCOURT_API_KEY");
    return key ? key : "";
}

struct BackendOptions {
    std::string scripted_path;
    std::string base_url;
    std::string model;
    int timeout_ms = 30000;
};

void add_backend_options(CLI::App* cmd, BackendOptions& opts) {
    cmd->add_option("--scripted", opts.scripted_path,
                    "Replay chat completions from this JSONL script instead of calling out");
    cmd->add_option("--base-url", opts.base_url,
                    "Chat-completions endpoint, e.g. https://api.example.com/v1");
    cmd->add_option("--model", opts.model, "Model name for the HTTP backend");
    cmd->add_option("--timeout-ms", opts.timeout_ms, "Per-request HTTP timeout");
}

std::shared_ptr<Gateway> make_gateway(const BackendOptions& opts) {
    if (!opts.scripted_path.empty())
        return std::make_shared<Gateway>(
            std::make_shared<ScriptedBackend>(load_script_file(opts.scripted_path)));
    if (!opts.base_url.empty()) {
        HttpBackendConfig config;
        config.base_url = opts.base_url;
        config.model = opts.model;
        config.api_key = env_api_key();
        config.timeout_ms = opts.timeout_ms;
        return std::make_shared<Gateway>(make_http_backend(config));
    }
    throw Error(ErrorKind::config, "no chat backend configured: pass --scripted or --base-url");
}

struct EmbeddingOptions {
    size_t dim = 64;
    uint64_t seed = 1;
    std::string url;  // optional HTTP embeddings endpoint
    std::string model;
};

void add_embedding_options(CLI::App* cmd, EmbeddingOptions& opts) {
    cmd->add_option("--embed-dim", opts.dim, "Hashing embedder dimension");
    cmd->add_option("--embed-seed", opts.seed, "Hashing embedder seed");
    cmd->add_option("--embed-url", opts.url, "HTTP embeddings endpoint (overrides the hasher)");
    cmd->add_option("--embed-model", opts.model, "Model name for HTTP embeddings");
}

std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingOptions& opts) {
    if (!opts.url.empty()) {
        HttpEmbeddingConfig config;
        config.base_url = opts.url;
        config.model = opts.model;
        config.api_key = env_api_key();
        return make_http_embedding_provider(config);
    }
    return std::make_shared<HashingEmbedder>(opts.dim, opts.seed);
}

PromptRegistry load_registry(const std::string& path) {
    return path.empty() ? PromptRegistry::defaults() : PromptRegistry::load_file(path);
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

void write_run_manifest(const std::string& out_dir, const nlohmann::json& manifest) {
    fs::create_directories(out_dir + "/runs");
    write_json_file(out_dir + "/runs/manifest.json", manifest);
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOptions {
    std::string corpus;
    std::string out = "out";
    size_t target = 1000;
    size_t k = 8;
    int64_t seed = 0;
    std::string markers_path;
    EmbeddingOptions embedding;
};

MarkerConfig load_markers(const std::string& path) {
    if (path.empty()) return MarkerConfig::defaults();
    auto doc = nlohmann::json::parse(read_text_file(path));
    MarkerConfig markers;
    markers.complaint_markers = doc.at("complaint").get<std::vector<std::string>>();
    markers.defense_markers = doc.at("defense").get<std::vector<std::string>>();
    if (markers.complaint_markers.empty() || markers.defense_markers.empty())
        throw Error(ErrorKind::config, "marker file needs non-empty complaint and defense lists");
    return markers;
}

int cmd_ingest(const IngestOptions& o) {
    auto provider = make_provider(o.embedding);
    auto docs = load_raw_documents(o.corpus);
    if (docs.empty()) throw Error(ErrorKind::empty_input, "corpus '" + o.corpus + "' has no documents");

    auto result = run_ingest(docs, load_markers(o.markers_path), PiiPatterns::defaults(), o.target,
                             o.k, o.seed, *provider);
    fs::create_directories(o.out);
    save_cases_jsonl(result.cases, o.out + "/cases.jsonl");
    write_json_file(o.out + "/corpus-manifest.json", result.manifest.to_json());

    std::cout << "documents: " << docs.size() << "\n";
    for (const auto& [category, count] : result.manifest.category_counts)
        std::cout << "  " << category << ": " << count << "\n";
    std::cout << "selected " << result.cases.size() << " cases into " << o.out << "/cases.jsonl\n";
    if (!result.failed_documents.empty()) {
        std::cout << "skipped " << result.failed_documents.size() << " documents:\n";
        for (const auto& reason : result.failed_documents) std::cout << "  " << reason << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string cases_path;
    std::string kb_dir;
    std::string out = "out";
    std::string prompts_path;
    int rounds = 3;
    int64_t seed = 0;
    int64_t history_budget = 8192;
    bool no_evolve = false;
    bool no_law = false;
    bool no_exp = false;
    bool no_case = false;
    BackendOptions backend;
    EmbeddingOptions embedding;
};

CourtroomAgents self_play_agents(const std::shared_ptr<Gateway>& gateway,
                                 const KnowledgeBases& kbs, const PromptRegistry& registry,
                                 bool first_takes_plaintiff) {
    CourtroomAgents agents;
    agents.registry = &registry;
    agents.support = {"support", gateway};
    agents.plaintiff_lawyer = {first_takes_plaintiff ? "lawyer-1" : "lawyer-2",
                               default_profile(Role::plaintiff_lawyer), gateway, &kbs};
    agents.defendant_lawyer = {first_takes_plaintiff ? "lawyer-2" : "lawyer-1",
                               default_profile(Role::defendant_lawyer), gateway, &kbs};
    return agents;
}

int cmd_simulate(const SimulateOptions& o) {
    const PromptRegistry registry = load_registry(o.prompts_path);
    auto gateway = make_gateway(o.backend);
    auto provider = make_provider(o.embedding);
    auto cases = load_cases_jsonl(o.cases_path);
    if (cases.empty()) throw Error(ErrorKind::empty_input, "no cases in '" + o.cases_path + "'");

    std::optional<StoreLock> lock;
    if (!o.no_evolve) lock.emplace(o.kb_dir);
    KnowledgeBases kbs =
        fs::exists(o.kb_dir) ? kb_load(o.kb_dir, provider) : KnowledgeBases(provider);
    const std::map<std::string, size_t> sizes_before = {
        {"regulations", kbs.regulations().size()},
        {"experience", kbs.experience().size()},
        {"cases", kbs.cases().size()},
    };

    TrialConfig config;
    config.debate_rounds = o.rounds;
    config.random_seed = o.seed;
    config.history_token_budget = o.history_budget;
    config.kb_flags = {!o.no_law, !o.no_exp, !o.no_case};
    config.validate();

    const std::string run_id = "s" + std::to_string(o.seed);
    const std::string transcripts_dir = o.out + "/transcripts";
    std::vector<std::string> transcript_paths;
    std::ostringstream evolution_lines;
    nlohmann::json failures = nlohmann::json::array();
    int ok = 0;

    for (const auto& record : cases) {
        const CourtroomAgents agents = self_play_agents(
            gateway, kbs, registry, first_lawyer_takes_plaintiff(o.seed, record.id));
        try {
            TrialTranscript transcript = run_trial(record, agents, config);
            transcript_paths.push_back(transcript_write(transcript, transcripts_dir, run_id));
            if (!o.no_evolve) {
                EvolutionReport report = evolve(kbs, transcript, *gateway, registry);
                nlohmann::json line = report.to_json();
                line["case_id"] = record.id;
                evolution_lines << line.dump() << "\n";
            }
            ++ok;
        } catch (const Error& e) {
            logging::error("simulate", "case '" + record.id + "' failed: " + e.what());
            failures.push_back({{"case_id", record.id}, {"error", e.what()}});
        }
    }

    if (!o.no_evolve) kb_save(kbs, o.kb_dir, gateway->backend_id());

    fs::create_directories(o.out + "/runs");
    if (!o.no_evolve) write_text_file(o.out + "/runs/evolution.jsonl", evolution_lines.str());
    write_run_manifest(o.out, {{"schema", "run/1"},
                               {"command", "simulate"},
                               {"seed", o.seed},
                               {"cases", cases.size()},
                               {"succeeded", ok},
                               {"failed", failures},
                               {"evolved", !o.no_evolve},
                               {"kb_dir", o.kb_dir},
                               {"kb_sizes_before", sizes_before},
                               {"kb_sizes_after",
                                {{"regulations", kbs.regulations().size()},
                                 {"experience", kbs.experience().size()},
                                 {"cases", kbs.cases().size()}}},
                               {"transcripts", transcript_paths}});

    std::cout << "simulated " << cases.size() << " cases: " << ok << " ok, " << failures.size()
              << " failed\n";
    std::cout << "kb sizes: regulations " << kbs.regulations().size() << ", experience "
              << kbs.experience().size() << ", cases " << kbs.cases().size()
              << (o.no_evolve ? " (evolution disabled)" : "") << "\n";
    return failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval-debate
// ---------------------------------------------------------------------------

struct EvalDebateOptions {
    std::string cases_path;
    std::string kb_a;
    std::string kb_b;
    std::string out = "out";
    std::string prompts_path;
    int rounds = 3;
    int64_t seed = 0;
    int64_t history_budget = 8192;
    bool no_swap = false;
    int parallel = 1;
    BackendOptions backend;
    EmbeddingOptions embedding;
};

int cmd_eval_debate(const EvalDebateOptions& o) {
    const PromptRegistry registry = load_registry(o.prompts_path);
    auto gateway = make_gateway(o.backend);
    auto provider = make_provider(o.embedding);
    auto cases = load_cases_jsonl(o.cases_path);
    if (cases.empty()) throw Error(ErrorKind::empty_input, "no cases in '" + o.cases_path + "'");

    std::optional<KnowledgeBases> kbs_a, kbs_b;
    if (!o.kb_a.empty()) kbs_a.emplace(kb_load(o.kb_a, provider));
    if (!o.kb_b.empty()) kbs_b.emplace(kb_load(o.kb_b, provider));

    TrialConfig config;
    config.debate_rounds = o.rounds;
    config.random_seed = o.seed;
    config.history_token_budget = o.history_budget;
    config.validate();

    const CaseRunner runner = [&](const CaseRecord& record, bool a_is_plaintiff) {
        CourtroomAgents agents;
        agents.registry = &registry;
        agents.support = {"support", gateway};
        const KnowledgeBases* a_kbs = kbs_a ? &*kbs_a : nullptr;
        const KnowledgeBases* b_kbs = kbs_b ? &*kbs_b : nullptr;
        agents.plaintiff_lawyer = {a_is_plaintiff ? "system-a" : "system-b",
                                   default_profile(Role::plaintiff_lawyer), gateway,
                                   a_is_plaintiff ? a_kbs : b_kbs};
        agents.defendant_lawyer = {a_is_plaintiff ? "system-b" : "system-a",
                                   default_profile(Role::defendant_lawyer), gateway,
                                   a_is_plaintiff ? b_kbs : a_kbs};
        return run_trial(record, agents, config);
    };

    PairwiseResult result =
        run_pairwise(cases, runner, *gateway, registry, !o.no_swap, o.parallel);
    const WinRateReport report = aggregate_winrates(result.judged);

    fs::create_directories(o.out + "/runs");
    write_json_file(o.out + "/runs/winrates.json", report.to_json());
    write_text_file(o.out + "/runs/winrates.csv", report.to_csv());
    write_text_file(o.out + "/runs/winrates-plot.csv", report.to_plot_csv());
    std::ostringstream verdict_lines;
    for (const auto& trial : result.judged)
        verdict_lines << nlohmann::json{
                             {"case_id", trial.sides.case_id},
                             {"a_is_plaintiff", trial.sides.a_is_plaintiff},
                             {"cognitive_agility", trial.verdict.cognitive_agility},
                             {"professional_knowledge", trial.verdict.professional_knowledge},
                             {"logical_rigor", trial.verdict.logical_rigor},
                             {"overall", trial.verdict.overall},
                             {"invalid", trial.verdict.invalid}}
                             .dump()
                      << "\n";
    write_text_file(o.out + "/runs/verdicts.jsonl", verdict_lines.str());
    write_run_manifest(o.out, {{"schema", "run/1"},
                               {"command", "eval-debate"},
                               {"seed", o.seed},
                               {"cases", cases.size()},
                               {"role_swap", !o.no_swap},
                               {"judged", result.judged.size()},
                               {"failed", result.failures.size()},
                               {"valid_verdicts", report.valid_count},
                               {"invalid_verdicts", report.invalid_count}});

    std::cout << "judged " << result.judged.size() << " trials (" << report.valid_count
              << " valid verdicts, " << result.failures.size() << " failures)\n";
    for (const auto& name : verdict_dimension_names()) {
        const auto& rates = report.dimensions.at(name);
        std::cout << "  " << name << ": win " << rates.win << "% / tie " << rates.tie
                  << "% / loss " << rates.loss << "%\n";
    }
    return result.failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval-bench
// ---------------------------------------------------------------------------

struct EvalBenchOptions {
    std::string questions_path;
    std::string mode = "base";
    std::string kb_dir;
    std::string out = "out";
    std::string prompts_path;
    int64_t seed = 0;
    int parallel = 1;
    BackendOptions backend;
    EmbeddingOptions embedding;
};

int cmd_eval_bench(const EvalBenchOptions& o) {
    const PromptRegistry registry = load_registry(o.prompts_path);
    auto gateway = make_gateway(o.backend);
    const BenchMode mode = bench_mode_from_name(o.mode);
    auto questions = load_bench_jsonl(o.questions_path);
    if (questions.empty())
        throw Error(ErrorKind::empty_input, "no questions in '" + o.questions_path + "'");

    std::optional<KnowledgeBases> kbs;
    if (mode == BenchMode::enhanced) {
        if (o.kb_dir.empty())
            throw Error(ErrorKind::config, "enhanced mode needs --kb pointing at a store");
        kbs.emplace(kb_load(o.kb_dir, make_provider(o.embedding)));
    }

    std::vector<BenchAnswer> answers(questions.size());
    parallel_for_index(questions.size(), o.parallel, [&](size_t i) {
        answers[i] = answer_mcq(questions[i], *gateway, registry, mode, kbs ? &*kbs : nullptr);
    });
    const BenchReport report = score_bench(questions, answers, mode);

    fs::create_directories(o.out + "/runs");
    write_json_file(o.out + "/runs/bench-report.json", report.to_json());
    write_text_file(o.out + "/runs/bench-report.csv", report.to_csv());

    int64_t gateway_failures = 0;
    for (const auto& answer : answers)
        if (answer.note.rfind("gateway failure", 0) == 0) ++gateway_failures;
    write_run_manifest(o.out, {{"schema", "run/1"},
                               {"command", "eval-bench"},
                               {"seed", o.seed},
                               {"mode", bench_mode_name(mode)},
                               {"questions", questions.size()},
                               {"correct", report.correct},
                               {"accuracy_percent", report.accuracy_percent},
                               {"gateway_failures", gateway_failures}});

    std::cout << "bench (" << bench_mode_name(mode) << "): " << report.correct << "/"
              << report.total << " correct, accuracy " << report.accuracy_percent << "%\n";
    return gateway_failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// kb stats
// ---------------------------------------------------------------------------

int cmd_kb_stats(const std::string& kb_dir) {
    fs::path dir(kb_dir);
    if (!fs::exists(dir)) {
        if (fs::exists(kb_dir + ".bak"))
            dir = kb_dir + ".bak";
        else
            throw Error(ErrorKind::missing_file, "no store at '" + kb_dir + "'");
    }

    std::cout << "store         entries  version  content_hash\n";
    int64_t total = 0;
    for (const char* name : {"regulations", "experience", "cases"}) {
        const auto manifest = StoreManifest::from_json(
            nlohmann::json::parse(read_text_file((dir / (std::string(name) + ".manifest")).string())));
        const std::string entries_text =
            read_text_file((dir / (std::string(name) + ".jsonl")).string());
        int64_t lines = 0;
        for (char c : entries_text)
            if (c == '\n') ++lines;
        if (lines != manifest.entry_count)
            throw Error(ErrorKind::hash_mismatch,
                        std::string("store '") + name + "' has " + std::to_string(lines) +
                            " entries, manifest says " + std::to_string(manifest.entry_count));
        std::cout << name << std::string(14 - std::string(name).size(), ' ')
                  << manifest.entry_count << "        " << manifest.updated << "        "
                  << manifest.content_hash << "\n";
        total += manifest.entry_count;
    }
    std::cout << "total         " << total << "\n";
    return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"Self-play courtroom simulation with evolving knowledge bases"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file; keys are the long option names");

    int exit_code = 0;

    IngestOptions ingest_opts;
    auto* ingest = app.add_subcommand(
        "ingest", "Classify raw documents, extract pleadings, and dedup-select a case corpus");
    ingest->add_option("--corpus", ingest_opts.corpus,
                       "Directory of .txt files or a JSONL file with id/text records")
        ->required();
    ingest->add_option("--out", ingest_opts.out, "Output directory");
    ingest->add_option("--target", ingest_opts.target, "Number of cases to select");
    ingest->add_option("--k", ingest_opts.k, "Cluster count for dedup selection");
    ingest->add_option("--seed", ingest_opts.seed, "Clustering seed");
    ingest->add_option("--markers", ingest_opts.markers_path,
                       "JSON file with complaint/defense marker lists");
    add_embedding_options(ingest, ingest_opts.embedding);
    ingest->callback([&] { exit_code = cmd_ingest(ingest_opts); });

    SimulateOptions sim_opts;
    auto* simulate = app.add_subcommand(
        "simulate", "Run self-play trials over a case file and evolve the knowledge bases");
    simulate->add_option("--cases", sim_opts.cases_path, "Case file (JSONL)")->required();
    simulate->add_option("--kb", sim_opts.kb_dir, "Knowledge-base directory")->required();
    simulate->add_option("--out", sim_opts.out, "Output directory");
    simulate->add_option("--rounds", sim_opts.rounds, "Debate rounds per trial");
    simulate->add_option("--seed", sim_opts.seed, "Run seed (side assignment, file naming)");
    simulate->add_option("--history-budget", sim_opts.history_budget,
                         "Token budget for rendered court history");
    simulate->add_option("--prompts", sim_opts.prompts_path, "Prompt registry file");
    simulate->add_flag("--no-evolve", sim_opts.no_evolve,
                       "Run trials only; leave the knowledge bases untouched");
    simulate->add_flag("--no-law", sim_opts.no_law, "Disable the regulations store");
    simulate->add_flag("--no-exp", sim_opts.no_exp, "Disable the experience store");
    simulate->add_flag("--no-case", sim_opts.no_case, "Disable the case library");
    add_backend_options(simulate, sim_opts.backend);
    add_embedding_options(simulate, sim_opts.embedding);
    simulate->callback([&] { exit_code = cmd_simulate(sim_opts); });

    EvalDebateOptions debate_opts;
    auto* eval_debate = app.add_subcommand(
        "eval-debate", "Pairwise debate evaluation between two systems with role swapping");
    eval_debate->add_option("--cases", debate_opts.cases_path, "Case file (JSONL)")->required();
    eval_debate->add_option("--kb-a", debate_opts.kb_a, "Knowledge bases for system A");
    eval_debate->add_option("--kb-b", debate_opts.kb_b, "Knowledge bases for system B");
    eval_debate->add_option("--out", debate_opts.out, "Output directory");
    eval_debate->add_option("--rounds", debate_opts.rounds, "Debate rounds per trial");
    eval_debate->add_option("--seed", debate_opts.seed, "Run seed");
    eval_debate->add_option("--history-budget", debate_opts.history_budget,
                            "Token budget for rendered court history");
    eval_debate->add_option("--prompts", debate_opts.prompts_path, "Prompt registry file");
    eval_debate->add_flag("--no-swap", debate_opts.no_swap,
                          "Judge each case once instead of once per side");
    eval_debate->add_option("--parallel", debate_opts.parallel, "Concurrent trials")
        ->check(CLI::PositiveNumber);
    add_backend_options(eval_debate, debate_opts.backend);
    add_embedding_options(eval_debate, debate_opts.embedding);
    eval_debate->callback([&] { exit_code = cmd_eval_debate(debate_opts); });

    EvalBenchOptions bench_opts;
    auto* eval_bench =
        app.add_subcommand("eval-bench", "Multiple-choice benchmark over courtroom questions");
    eval_bench->add_option("--questions", bench_opts.questions_path, "Question file (JSONL)")
        ->required();
    eval_bench->add_option("--mode", bench_opts.mode, "base or enhanced")
        ->check(CLI::IsMember({"base", "enhanced"}));
    eval_bench->add_option("--kb", bench_opts.kb_dir, "Knowledge bases for enhanced mode");
    eval_bench->add_option("--out", bench_opts.out, "Output directory");
    eval_bench->add_option("--seed", bench_opts.seed, "Run seed");
    eval_bench->add_option("--prompts", bench_opts.prompts_path, "Prompt registry file");
    eval_bench->add_option("--parallel", bench_opts.parallel, "Concurrent questions")
        ->check(CLI::PositiveNumber);
    add_backend_options(eval_bench, bench_opts.backend);
    add_embedding_options(eval_bench, bench_opts.embedding);
    eval_bench->callback([&] { exit_code = cmd_eval_bench(bench_opts); });

    std::string stats_kb_dir;
    auto* kb = app.add_subcommand("kb", "Inspect knowledge-base stores");
    kb->require_subcommand(1);
    auto* stats = kb->add_subcommand("stats", "Per-store entry counts and manifest versions");
    stats->add_option("--kb", stats_kb_dir, "Knowledge-base directory")->required();
    stats->callback([&] { exit_code = cmd_kb_stats(stats_kb_dir); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

}  // namespace agentcourt
