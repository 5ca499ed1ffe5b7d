#include <doctest/doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "agentcourt/ingest.hpp"
#include "agentcourt/errors.hpp"
#include "agentcourt/persistence.hpp"
#include "support/fixtures.hpp"

using namespace agentcourt;

namespace {

RawDocument doc(const std::string& id, const std::string& text) { return {id, text}; }

// Reference clustering written independently against the documented contract:
// seeded-shuffle initialization, squared Euclidean, lowest-index ties,
// empty clusters reseeded to the point farthest from its own centroid.
KMeansResult ref_kmeans(const std::vector<Vector>& points, size_t k, uint64_t seed,
                        int max_iterations = 100) {
    const size_t n = points.size();
    const size_t dim = points.front().size();
    auto dist2 = [&](const Vector& a, const Vector& b) {
        double s = 0.0;
        for (size_t d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
        return s;
    };

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    KMeansResult res;
    for (size_t c = 0; c < k; ++c) res.centroids.push_back(points[order[c]]);
    res.assignment.assign(n, -1);

    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter + 1;
        std::vector<int> next(n);
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            for (size_t c = 1; c < k; ++c)
                if (dist2(points[i], res.centroids[c]) < dist2(points[i], res.centroids[best]))
                    best = static_cast<int>(c);
            next[i] = best;
        }
        for (size_t c = 0; c < k; ++c) {
            Vector mean(dim, 0.0);
            size_t count = 0;
            for (size_t i = 0; i < n; ++i) {
                if (next[i] != static_cast<int>(c)) continue;
                ++count;
                for (size_t d = 0; d < dim; ++d) mean[d] += points[i][d];
            }
            if (count > 0) {
                for (double& v : mean) v /= static_cast<double>(count);
                res.centroids[c] = mean;
            } else {
                size_t pick = 0;
                double far = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    double d = dist2(points[i], res.centroids[next[i]]);
                    if (d > far) {
                        far = d;
                        pick = i;
                    }
                }
                res.centroids[c] = points[pick];
            }
        }
        if (next == res.assignment) break;
        res.assignment = next;
    }
    return res;
}

// Maps each text to a fixed vector, making clustering arithmetic exact.
class StubProvider : public EmbeddingProvider {
public:
    StubProvider(std::map<std::string, Vector> table, size_t dim)
        : table_(std::move(table)), dim_(dim) {}

    Vector embed(const std::string& text) override {
        auto it = table_.find(text);
        if (it == table_.end()) throw Error(ErrorKind::contract, "no stub vector for: " + text);
        return it->second;
    }
    size_t dim() const override { return dim_; }
    std::string id() const override { return "stub"; }

private:
    std::map<std::string, Vector> table_;
    size_t dim_;
};

CaseRecord simple_case(const std::string& id, const std::string& complaint) {
    CaseRecord record;
    record.id = id;
    record.complaint = complaint;
    record.defense = "The defendant denies the claim in " + id + ".";
    return record;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("document classification") {
    auto markers = MarkerConfig::defaults();
    CHECK(classify_document(doc("d1", "Complaint: x. Defense: y."), markers) == DocCategory::both);
    CHECK(classify_document(doc("d2", "Plaintiff claims: unpaid wages."), markers) ==
          DocCategory::complaint_only);
    CHECK(classify_document(doc("d3", "A court visit report."), markers) == DocCategory::neither);
    CHECK_THROWS_AS(classify_document(doc("d4", ""), markers), Error);
    CHECK(std::string(doc_category_name(DocCategory::both)) == "both");
}

TEST_CASE("pleading extraction in both section orders") {
    auto markers = MarkerConfig::defaults();
    auto [complaint, defense] =
        extract_pleadings(doc("d1", "Header.\nComplaint:\n The pipes burst. \nDefense:\n "
                                    "Maintenance was current. "),
                          markers);
    CHECK(complaint == "The pipes burst.");
    CHECK(defense == "Maintenance was current.");

    std::tie(complaint, defense) = extract_pleadings(
        doc("d2", "Defense statement: We deny everything. Complaint: The goods never arrived."),
        markers);
    CHECK(complaint == "The goods never arrived.");
    CHECK(defense == "We deny everything.");
}

TEST_CASE("marker search prefers earliest, then longest") {
    auto markers = MarkerConfig::defaults();
    // "Indictment:" appears before "Complaint:", so the complaint section
    // starts after the indictment marker.
    auto [complaint, defense] =
        extract_pleadings(doc("d1", "Indictment: theft of cargo. Complaint: ignored duplicate. "
                                    "Defense: alibi provided."),
                          markers);
    CHECK(complaint == "theft of cargo. Complaint: ignored duplicate.");

    // "Defense statement:" and "Defense:" start at the same position; the
    // longer marker wins so the section does not begin with "statement:".
    std::tie(complaint, defense) =
        extract_pleadings(doc("d2", "Complaint: fraud. Defense statement: denial."), markers);
    CHECK(defense == "denial.");
}

TEST_CASE("extraction failure modes") {
    auto markers = MarkerConfig::defaults();
    try {
        extract_pleadings(doc("d1", "Complaint: only one side here."), markers);
        FAIL("expected contract");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::contract);
    }
    try {
        extract_pleadings(doc("d2", "Complaint: Defense: all content on one side."), markers);
        FAIL("expected extraction_failure");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::extraction_failure);
        CHECK(contains(err.what(), "empty complaint"));
    }
    MarkerConfig overlapping{{"AB"}, {"BC"}};
    try {
        extract_pleadings(doc("d3", "xABCy"), overlapping);
        FAIL("expected extraction_failure");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::extraction_failure);
        CHECK(contains(err.what(), "overlapping"));
    }
}

TEST_CASE("pii screening") {
    auto pii = PiiPatterns::defaults();
    CHECK(find_pii("the claim concerns a contract signed in 2023", pii).empty());
    auto hits = find_pii("contact alice.smith@example.com or 123-45-6789", pii);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0] == "alice.smith@example.com");
    CHECK(hits[1] == "123-45-6789");
    CHECK(find_pii("account 123456789012", pii).size() == 1);
    CHECK(find_pii("short id 1234567890", pii).empty());

    CHECK_THROWS_AS(find_pii("text", PiiPatterns{{"(unclosed"}}), Error);
}

TEST_CASE("kmeans contract errors") {
    CHECK_THROWS_AS(kmeans({}, 1, 0), Error);
    std::vector<Vector> points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(kmeans(points, 0, 0), Error);
    CHECK_THROWS_AS(kmeans(points, 3, 0), Error);
    CHECK_THROWS_AS(kmeans({{0, 0}, {1, 1, 1}}, 1, 0), Error);
}

TEST_CASE("kmeans separates well-spaced blobs for any seed") {
    std::vector<Vector> points;
    for (int i = 0; i < 6; ++i) points.push_back({10.0 + 0.1 * i, 0.0});
    for (int i = 0; i < 6; ++i) points.push_back({-10.0 - 0.1 * i, 5.0});
    for (uint64_t seed : {0ULL, 1ULL, 7ULL, 42ULL}) {
        CAPTURE(seed);
        auto result = kmeans(points, 2, seed);
        std::set<int> left(result.assignment.begin(), result.assignment.begin() + 6);
        std::set<int> right(result.assignment.begin() + 6, result.assignment.end());
        CHECK(left.size() == 1);
        CHECK(right.size() == 1);
        CHECK(*left.begin() != *right.begin());
    }
}

TEST_CASE("kmeans isolates an outlier even when both seeds start in the main mass") {
    std::vector<Vector> points(9, Vector{0.0, 0.0});
    for (size_t i = 0; i < 9; ++i) points[i][0] = 0.01 * static_cast<double>(i);
    points.push_back({100.0, 100.0});
    for (uint64_t seed = 0; seed < 10; ++seed) {
        CAPTURE(seed);
        auto result = kmeans(points, 2, seed);
        const int outlier_cluster = result.assignment.back();
        int companions = 0;
        for (size_t i = 0; i + 1 < points.size(); ++i)
            if (result.assignment[i] == outlier_cluster) ++companions;
        CHECK(companions == 0);
    }
}

TEST_CASE("kmeans matches an independent implementation") {
    std::mt19937 rng(4321);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::vector<Vector> points;
    for (int i = 0; i < 40; ++i) {
        Vector v(3);
        for (double& x : v) x = dist(rng);
        points.push_back(v);
    }
    for (uint64_t seed : {1ULL, 9ULL, 123ULL}) {
        for (size_t k : {size_t{1}, size_t{2}, size_t{5}}) {
            CAPTURE(seed);
            CAPTURE(k);
            auto got = kmeans(points, k, seed);
            auto want = ref_kmeans(points, k, seed);
            CHECK(got.assignment == want.assignment);
            CHECK(got.iterations == want.iterations);
            REQUIRE(got.centroids.size() == want.centroids.size());
            for (size_t c = 0; c < k; ++c)
                for (size_t d = 0; d < 3; ++d)
                    CHECK(got.centroids[c][d] == doctest::Approx(want.centroids[c][d]));
        }
    }
}

TEST_CASE("selection takes proportional quotas nearest each centroid") {
    // Eight duplicate complaints in blob A, four in blob B; exact vectors
    // make quotas and tie-breaks fully predictable.
    std::map<std::string, Vector> table;
    std::vector<CaseRecord> corpus;
    for (int i = 0; i < 8; ++i) {
        auto record = simple_case("a" + std::to_string(i), "blob a complaint");
        corpus.push_back(record);
    }
    for (int i = 0; i < 4; ++i) {
        auto record = simple_case("b" + std::to_string(i), "blob b complaint");
        corpus.push_back(record);
    }
    table["blob a complaint"] = {1.0, 0.0};
    table["blob b complaint"] = {0.0, 1.0};
    StubProvider provider(std::move(table), 2);

    auto manifest = dedup_select(corpus, 6, 2, 11, provider);
    REQUIRE(manifest.selected_ids.size() == 6);
    // Quotas: round(6*8/12) = 4 from A, round(6*4/12) = 2 from B. All blob
    // members tie on distance, so the lexicographically smallest ids win.
    CHECK(manifest.selected_ids ==
          std::vector<std::string>{"a0", "a1", "a2", "a3", "b0", "b1"});
    CHECK(manifest.k_clusters == 2);
    CHECK(manifest.seed == 11);
    CHECK(manifest.cluster_assignment.at("a0") == manifest.cluster_assignment.at("a7"));
    CHECK(manifest.cluster_assignment.at("a0") != manifest.cluster_assignment.at("b0"));
}

TEST_CASE("quota remainder is rebalanced when rounding oversubscribes") {
    // Three equal blobs of four: per-cluster round(2*4/12) = 1 each sums to
    // 3 for a target of 2, so one cluster gives its slot back.
    std::map<std::string, Vector> table = {
        {"blob a complaint", {1.0, 0.0, 0.0}},
        {"blob b complaint", {0.0, 1.0, 0.0}},
        {"blob c complaint", {0.0, 0.0, 1.0}},
    };
    std::vector<CaseRecord> corpus;
    for (const char* blob : {"a", "b", "c"})
        for (int i = 0; i < 4; ++i)
            corpus.push_back(simple_case(std::string(blob) + std::to_string(i),
                                         std::string("blob ") + blob + " complaint"));
    StubProvider provider(std::move(table), 3);

    auto manifest = dedup_select(corpus, 2, 3, 5, provider);
    REQUIRE(manifest.selected_ids.size() == 2);
    std::set<char> blobs;
    for (const auto& id : manifest.selected_ids) blobs.insert(id[0]);
    CHECK(blobs.size() == 2);  // two different blobs, one member each
}

TEST_CASE("selection is deterministic for a fixed seed") {
    std::vector<CaseRecord> corpus;
    for (int i = 0; i < 6; ++i)
        corpus.push_back(simple_case(
            "cargo-" + std::to_string(i),
            "The carrier delivered refrigerated produce spoiled after a cooling failure, variant " +
                std::to_string(i) + "."));
    for (int i = 0; i < 6; ++i)
        corpus.push_back(simple_case(
            "labor-" + std::to_string(i),
            "The employer dismissed the worker without notice or severance pay, variant " +
                std::to_string(i) + "."));

    auto provider = testing::test_provider();
    auto first = dedup_select(corpus, 4, 2, 99, *provider);
    auto second = dedup_select(corpus, 4, 2, 99, *provider);
    CHECK(first.to_json() == second.to_json());
    REQUIRE(first.selected_ids.size() == 4);

    int cargo = 0, labor = 0;
    for (const auto& id : first.selected_ids)
        (id.rfind("cargo-", 0) == 0 ? cargo : labor) += 1;
    CHECK(cargo == 2);
    CHECK(labor == 2);
}

TEST_CASE("dedup_select contract errors") {
    auto provider = testing::test_provider();
    CHECK_THROWS_AS(dedup_select({}, 1, 1, 0, *provider), Error);
    std::vector<CaseRecord> corpus = {simple_case("x", "a short complaint")};
    CHECK_THROWS_AS(dedup_select(corpus, 2, 1, 0, *provider), Error);
    CHECK_THROWS_AS(dedup_select(corpus, 1, 2, 0, *provider), Error);
}

TEST_CASE("corpus manifest round-trip") {
    CorpusManifest manifest;
    manifest.category_counts = {{"both", 10}, {"neither", 3}};
    manifest.selected_ids = {"a", "b"};
    manifest.cluster_assignment = {{"a", 0}, {"b", 1}};
    manifest.k_clusters = 2;
    manifest.seed = 42;

    auto restored = CorpusManifest::from_json(manifest.to_json());
    CHECK(restored.to_json() == manifest.to_json());

    auto bad = manifest.to_json();
    bad["schema"] = "corpus-manifest/2";
    try {
        CorpusManifest::from_json(bad);
        FAIL("expected unsupported_version");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::unsupported_version);
    }
}

TEST_CASE("raw documents load from a directory in path order") {
    testing::TempDir dir("ingest");
    write_text_file(dir.sub("b.txt"), "second doc");
    write_text_file(dir.sub("a.txt"), "first doc");
    write_text_file(dir.sub("notes.md"), "ignored");
    auto docs = load_raw_documents(dir.path());
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "a");
    CHECK(docs[0].full_text == "first doc");
    CHECK(docs[1].id == "b");
}

TEST_CASE("raw documents load from jsonl") {
    testing::TempDir dir("ingest");
    auto path = dir.sub("corpus.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id": "d1", "text": "Complaint: x. Defense: y."})" << "\n\n";
        out << R"({"id": "d2", "text": "plain text"})" << "\n";
    }
    auto docs = load_raw_documents(path);
    REQUIRE(docs.size() == 2);
    CHECK(docs[1].id == "d2");

    CHECK_THROWS_AS(load_raw_documents(dir.sub("missing.jsonl")), Error);
    write_text_file(dir.sub("bad.jsonl"), "not json\n");
    CHECK_THROWS_AS(load_raw_documents(dir.sub("bad.jsonl")), Error);
}

TEST_CASE("case record json round-trip") {
    auto record = testing::cargo_case();
    record.source_meta = {{"source_doc", "d-17"}};
    auto restored = case_from_json(case_to_json(record));
    CHECK(restored.id == record.id);
    CHECK(restored.complaint == record.complaint);
    CHECK(restored.defense == record.defense);
    CHECK(restored.category == record.category);
    CHECK(restored.source_meta == record.source_meta);

    auto bad = case_to_json(record);
    bad["schema"] = "case/2";
    CHECK_THROWS_AS(case_from_json(bad), Error);

    testing::TempDir dir("ingest");
    auto path = dir.sub("cases.jsonl");
    save_cases_jsonl({record, testing::cargo_case_variant(1)}, path);
    auto cases = load_cases_jsonl(path);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].id == "cargo-1");
    CHECK(cases[1].id == "cargo-2");
}

TEST_CASE("full ingest pipeline accounts for every document") {
    auto markers = MarkerConfig::defaults();
    auto pii = PiiPatterns::defaults();
    std::vector<RawDocument> docs = {
        doc("good-1", "Complaint: The carrier spoiled refrigerated produce during the voyage. "
                      "Defense: The shipper loaded the produce warm."),
        doc("skip-1", "Plaintiff claims: unpaid invoices for delivered timber."),
        doc("skip-2", "An unrelated inspection memo."),
        doc("pii-1", "Complaint: Write to claims@example.com about the loss. Defense: denied."),
        doc("fail-1", "Complaint: Defense: everything is on one side."),
        doc("good-2", "Complaint: The employer dismissed the worker without severance. "
                      "Defense: The dismissal followed documented misconduct."),
    };
    auto provider = testing::test_provider();
    auto result = run_ingest(docs, markers, pii, 2, 2, 7, *provider);

    CHECK(result.manifest.category_counts.at("both") == 4);
    CHECK(result.manifest.category_counts.at("complaint_only") == 1);
    CHECK(result.manifest.category_counts.at("neither") == 1);

    REQUIRE(result.failed_documents.size() == 2);
    CHECK(contains(result.failed_documents[0], "pii-1: PII pattern matched 'claims@example.com'"));
    CHECK(contains(result.failed_documents[1], "fail-1"));
    CHECK(contains(result.failed_documents[1], "empty complaint"));

    REQUIRE(result.cases.size() == 2);
    CHECK(result.cases[0].id == "good-1");
    CHECK(result.cases[1].id == "good-2");
    CHECK(result.manifest.selected_ids == std::vector<std::string>{"good-1", "good-2"});
    CHECK(contains(result.cases[0].complaint, "spoiled refrigerated produce"));
    CHECK(contains(result.cases[0].defense, "loaded the produce warm"));
}

TEST_CASE("ingest clamps target and cluster count to what survived") {
    auto markers = MarkerConfig::defaults();
    auto pii = PiiPatterns::defaults();
    std::vector<RawDocument> docs = {
        doc("only", "Complaint: A single usable pleading. Defense: Still contested."),
    };
    auto provider = testing::test_provider();
    auto result = run_ingest(docs, markers, pii, 50, 8, 3, *provider);
    CHECK(result.cases.size() == 1);
    CHECK(result.manifest.k_clusters == 1);

    auto empty = run_ingest({doc("memo", "no markers at all")}, markers, pii, 5, 2, 3, *provider);
    CHECK(empty.cases.empty());
    CHECK(empty.manifest.selected_ids.empty());
    CHECK(empty.manifest.category_counts.at("neither") == 1);
}

}  // TEST_SUITE
