#include <doctest/doctest.h>

#include <filesystem>
#include <map>
#include <random>
#include <vector>

#include "agentcourt/errors.hpp"
#include "agentcourt/persistence.hpp"
#include "support/fixtures.hpp"

using namespace agentcourt;
namespace fs = std::filesystem;

namespace {

// Contents are mostly random tokens so near-duplicate folding never kicks in
// and the store genuinely reaches the intended size.
std::string noise_words(std::mt19937& rng, int count) {
    static const char* words[] = {"carriage", "demurrage", "salvage", "consignee", "charter",
                                  "manifest", "quarantine", "arbitration", "lien",  "laytime",
                                  "stevedore", "baltic",    "freight",  "clause",  "voyage"};
    std::uniform_int_distribution<size_t> pick(0, std::size(words) - 1);
    std::string text;
    for (int i = 0; i < count; ++i) {
        if (!text.empty()) text += ' ';
        text += words[pick(rng)];
        text += std::to_string(rng() % 1000);
    }
    return text;
}

void fill_stores(KnowledgeBases& kbs, int per_store, uint32_t seed) {
    std::mt19937 rng(seed);
    for (int i = 0; i < per_store; ++i) {
        RegulationEntry regulation;
        regulation.content = "Provision " + std::to_string(i) + ": " + noise_words(rng, 8);
        regulation.purpose = "purpose " + std::to_string(i);
        regulation.issue = "issue " + std::to_string(i);
        regulation.source = RegulationSource::direct;
        kbs.regulations().insert(std::move(regulation));

        ExperienceEntry experience;
        experience.context = "context " + std::to_string(i);
        experience.content = "Lesson " + std::to_string(i) + ": " + noise_words(rng, 8);
        experience.focus_points = {"f1 " + std::to_string(i), "f2", "f3"};
        experience.guidelines = {"g1", "g2 " + std::to_string(i), "g3"};
        kbs.experience().insert(std::move(experience));

        CaseEntry precedent;
        precedent.content = "Precedent " + std::to_string(i) + ": " + noise_words(rng, 8);
        precedent.case_type = "contract dispute";
        precedent.keywords = {"k1 " + std::to_string(i), "k2", "k3"};
        precedent.quick_reaction_points = {"q1", "q2", "q3 " + std::to_string(i)};
        precedent.response_directions = {"r1 " + std::to_string(i), "r2", "r3"};
        kbs.cases().insert(std::move(precedent));
    }
}

template <typename Entry>
std::vector<nlohmann::json> dump_entries(const EntryStore<Entry>& store) {
    std::vector<nlohmann::json> dumped;
    for (const auto& entry : store.entries()) dumped.push_back(entry_to_json(entry));
    return dumped;
}

void check_same_stores(const KnowledgeBases& a, const KnowledgeBases& b) {
    CHECK(dump_entries(a.regulations()) == dump_entries(b.regulations()));
    CHECK(dump_entries(a.experience()) == dump_entries(b.experience()));
    CHECK(dump_entries(a.cases()) == dump_entries(b.cases()));
}

std::map<std::string, std::string> snapshot_files(const std::string& directory) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(directory))
        files[entry.path().filename().string()] = read_text_file(entry.path().string());
    return files;
}

TrialTranscript tiny_transcript(const std::string& case_id) {
    TrialTranscript transcript;
    transcript.case_id = case_id;
    DialogueTurn turn;
    turn.speaker = Role::judge;
    turn.phase = CourtPhase::judgment;
    turn.content = "Judgment for the plaintiff in the amount claimed.";
    transcript.turns.push_back(turn);
    transcript.verdict =
        VerdictRecord{turn.content, {"liability"}, AwardedTo::plaintiff};
    transcript.role_assignment = {{Role::judge, "support"},
                                  {Role::clerk, "support"},
                                  {Role::plaintiff_lawyer, "lawyer-1"},
                                  {Role::defendant_lawyer, "lawyer-2"},
                                  {Role::plaintiff, "support"},
                                  {Role::defendant, "support"}};
    return transcript;
}

struct InjectedFault {};

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("large store survives a save and load round-trip") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 167, 2024);
    const size_t regulation_count = kbs.size(KbKind::law);
    CHECK(kbs.total_size() >= 500);

    auto manifests = kb_save(kbs, dir.sub("kb"), "scripted");
    CHECK(manifests.at("regulations").entry_count ==
          static_cast<int64_t>(regulation_count));
    CHECK(manifests.at("regulations").chat_provider == "scripted");
    CHECK(manifests.at("experience").dim == kbs.provider()->dim());

    auto loaded = kb_load(dir.sub("kb"));  // provider rebuilt from the manifest id
    CHECK(loaded.provider()->id() == kbs.provider()->id());
    check_same_stores(kbs, loaded);

    // Retrieval over the loaded store behaves like the original.
    auto before = kbs.retrieve(KbKind::case_law, "charter arbitration clause", 5);
    auto after = loaded.retrieve(KbKind::case_law, "charter arbitration clause", 5);
    REQUIRE(before.size() == after.size());
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].entry_id == after[i].entry_id);
        CHECK(before[i].text == after[i].text);
        CHECK(before[i].score == doctest::Approx(after[i].score));
    }
}

TEST_CASE("an interrupted save at any step leaves the previous version loadable") {
    KnowledgeBases v1(testing::test_provider());
    fill_stores(v1, 3, 7);

    for (const auto& step : kb_save_steps()) {
        CAPTURE(step);
        testing::TempDir dir("persist");
        const std::string kb_dir = dir.sub("kb");
        kb_save(v1, kb_dir);

        KnowledgeBases v2(testing::test_provider());
        fill_stores(v2, 4, 8);
        CHECK_THROWS_AS(kb_save(v2, kb_dir, "", [&](const std::string& at) {
                            if (at == step) throw InjectedFault{};
                        }),
                        InjectedFault);

        auto recovered = kb_load(kb_dir);
        check_same_stores(v1, recovered);
    }
}

TEST_CASE("tampered files are refused") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 2, 1);
    kb_save(kbs, dir.sub("kb"));

    const std::string entries = dir.sub("kb") + "/experience.jsonl";
    write_text_file(entries, read_text_file(entries) + "{\"forged\": true}\n");
    try {
        kb_load(dir.sub("kb"));
        FAIL("expected hash_mismatch");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::hash_mismatch);
        CHECK(contains(err.what(), "experience"));
    }
}

TEST_CASE("future schema versions are refused") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 1, 1);
    kb_save(kbs, dir.sub("kb"));

    const std::string manifest_path = dir.sub("kb") + "/regulations.manifest";
    auto doc = nlohmann::json::parse(read_text_file(manifest_path));
    doc["schema"] = "kb/2";
    write_text_file(manifest_path, doc.dump(2) + "\n");
    try {
        kb_load(dir.sub("kb"));
        FAIL("expected unsupported_version");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::unsupported_version);
    }
}

TEST_CASE("load falls back to the backup directory") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 2, 3);
    kb_save(kbs, dir.sub("kb"));
    fs::rename(dir.sub("kb"), dir.sub("kb.bak"));

    auto recovered = kb_load(dir.sub("kb"));
    check_same_stores(kbs, recovered);

    fs::remove_all(dir.sub("kb.bak"));
    CHECK_THROWS_AS(kb_load(dir.sub("kb")), Error);
}

TEST_CASE("resaving unchanged stores is byte-idempotent") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 3, 5);
    kb_save(kbs, dir.sub("kb"));
    auto first = snapshot_files(dir.sub("kb"));

    kb_save(kbs, dir.sub("kb"));
    CHECK(snapshot_files(dir.sub("kb")) == first);

    // Touching one store bumps only that store's version counters.
    ExperienceEntry extra;
    extra.context = "late addition";
    extra.content = "A completely new lesson about laytime exceptions and notice.";
    extra.focus_points = {"notice", "laytime", "exceptions"};
    extra.guidelines = {"Check the notice", "Count the days", "Reserve rights"};
    kbs.experience().insert(std::move(extra));
    auto manifests = kb_save(kbs, dir.sub("kb"));
    auto third = snapshot_files(dir.sub("kb"));
    CHECK(third.at("regulations.manifest") == first.at("regulations.manifest"));
    CHECK(third.at("cases.jsonl") == first.at("cases.jsonl"));
    CHECK(third.at("experience.manifest") != first.at("experience.manifest"));
    CHECK(manifests.at("experience").created == 1);
    CHECK(manifests.at("experience").updated == 2);
    CHECK(manifests.at("regulations").updated == 1);
}

TEST_CASE("provider identity is checked against the manifest") {
    testing::TempDir dir("persist");
    KnowledgeBases kbs(testing::test_provider());
    fill_stores(kbs, 1, 9);
    kb_save(kbs, dir.sub("kb"));

    CHECK_NOTHROW(kb_load(dir.sub("kb"), testing::test_provider()));

    auto other = embedding_provider_from_id("hash:dim=16:seed=9");
    try {
        kb_load(dir.sub("kb"), other);
        FAIL("expected config error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::config);
        CHECK(contains(err.what(), "hash:dim=16:seed=9"));
    }

    // A provider id nobody can reconstruct needs an explicit provider.
    for (const char* name : {"regulations", "experience", "cases"}) {
        const std::string path = dir.sub("kb") + "/" + name + ".manifest";
        auto doc = nlohmann::json::parse(read_text_file(path));
        doc["embedding_provider"] = "http-embed:model=m";
        write_text_file(path, doc.dump(2) + "\n");
    }
    try {
        kb_load(dir.sub("kb"));
        FAIL("expected config error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::config);
        CHECK(contains(err.what(), "pass one explicitly"));
    }
}

TEST_CASE("store manifest json round-trip") {
    StoreManifest manifest;
    manifest.entry_count = 4;
    manifest.content_hash = "abc";
    manifest.index_hash = "def";
    manifest.created = 3;
    manifest.updated = 9;
    manifest.embedding_provider = "hash:dim=64:seed=1";
    manifest.chat_provider = "scripted";
    manifest.dim = 64;

    auto doc = manifest.to_json();
    CHECK(doc.at("metric") == "cosine");
    auto restored = StoreManifest::from_json(doc);
    CHECK(restored.entry_count == 4);
    CHECK(restored.updated == 9);
    CHECK(restored.embedding_provider == "hash:dim=64:seed=1");

    doc["schema"] = "kb/3";
    CHECK_THROWS_AS(StoreManifest::from_json(doc), Error);
}

TEST_CASE("transcripts archive with unique names and round-trip") {
    testing::TempDir dir("persist");
    auto transcript = tiny_transcript("cargo-1");
    auto first = transcript_write(transcript, dir.sub("transcripts"), "run-a");
    CHECK(contains(first, "cargo-1-run-a.json"));
    auto second = transcript_write(transcript, dir.sub("transcripts"), "run-a");
    CHECK(contains(second, "cargo-1-run-a-2.json"));
    auto third = transcript_write(transcript, dir.sub("transcripts"), "run-a");
    CHECK(contains(third, "cargo-1-run-a-3.json"));

    auto restored = transcript_read(first);
    CHECK(transcript_to_json(restored) == transcript_to_json(transcript));
    CHECK(restored.verdict->awarded_to == AwardedTo::plaintiff);

    transcript.verdict.reset();
    try {
        transcript_write(transcript, dir.sub("transcripts"), "run-a");
        FAIL("expected contract");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::contract);
        CHECK(contains(err.what(), "no verdict"));
    }
}

TEST_CASE("store lock admits one writer at a time") {
    testing::TempDir dir("persist");
    const std::string kb_dir = dir.sub("kb");
    auto lock = std::make_unique<StoreLock>(kb_dir);
    CHECK(fs::exists(kb_dir + ".lock"));

    try {
        StoreLock second(kb_dir);
        FAIL("expected lock_held");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::lock_held);
        CHECK(contains(err.what(), ".lock"));
    }

    lock->release();
    CHECK_FALSE(fs::exists(kb_dir + ".lock"));
    CHECK_NOTHROW(StoreLock{kb_dir});  // destructor releases again
    CHECK_FALSE(fs::exists(kb_dir + ".lock"));
}

TEST_CASE("text file helpers") {
    testing::TempDir dir("persist");
    write_text_file(dir.sub("note.txt"), "line one\nline two\n");
    CHECK(read_text_file(dir.sub("note.txt")) == "line one\nline two\n");
    CHECK_THROWS_AS(read_text_file(dir.sub("absent.txt")), Error);
    CHECK_THROWS_AS(write_text_file(dir.sub("no-such-dir/file.txt"), "x"), Error);
}

}  // TEST_SUITE
