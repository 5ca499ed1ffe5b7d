#include "agentcourt/persistence.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "agentcourt/errors.hpp"
#include "agentcourt/log.hpp"
#include "agentcourt/util.hpp"

namespace fs = std::filesystem;

namespace agentcourt {

namespace {

constexpr const char* kStoreNames[] = {"regulations", "experience", "cases"};

// Hashes are taken over bytes with carriage returns dropped, so a file that
// round-trips through a CRLF filesystem still verifies.
std::string normalized_hash(const std::string& text) {
    std::string normalized;
    normalized.reserve(text.size());
    for (char c : text)
        if (c != '\r') normalized.push_back(c);
    return hex64(fnv1a64(normalized));
}

struct RenderedStore {
    std::string entries_text;
    std::string index_text;
};

template <typename Entry>
RenderedStore render_store(const EntryStore<Entry>& store) {
    RenderedStore rendered;
    std::ostringstream entries, index;
    for (const auto& entry : store.entries()) {
        entries << entry_to_json(entry).dump() << "\n";
        const Vector* vec = store.index().find(entry.entry_id);
        if (!vec)
            throw Error(ErrorKind::contract, "entry '" + entry.entry_id + "' has no index vector");
        index << nlohmann::json{{"entry_id", entry.entry_id}, {"vector", *vec}}.dump() << "\n";
    }
    rendered.entries_text = entries.str();
    rendered.index_text = index.str();
    return rendered;
}

std::optional<StoreManifest> read_prior_manifest(const fs::path& directory,
                                                 const std::string& store_name) {
    const fs::path path = directory / (store_name + ".manifest");
    if (!fs::exists(path)) return std::nullopt;
    try {
        return StoreManifest::from_json(nlohmann::json::parse(read_text_file(path.string())));
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable prior manifest; treat as fresh store
    }
}

void fire(const FaultHook& hook, const std::string& step) {
    if (hook) hook(step);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

nlohmann::json parse_line(const std::string& line, const std::string& what) {
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorKind::io, what + ": line is not a JSON object");
    return doc;
}

template <typename Entry>
void load_store(EntryStore<Entry>& store, const fs::path& directory,
                const std::string& store_name, const StoreManifest& manifest) {
    const std::string entries_text =
        read_text_file((directory / (store_name + ".jsonl")).string());
    const std::string index_text = read_text_file((directory / (store_name + ".index")).string());
    if (normalized_hash(entries_text) != manifest.content_hash)
        throw Error(ErrorKind::hash_mismatch, "store '" + store_name + "' entries changed on disk");
    if (normalized_hash(index_text) != manifest.index_hash)
        throw Error(ErrorKind::hash_mismatch, "store '" + store_name + "' index changed on disk");

    const auto entry_lines = split_lines(entries_text);
    if (static_cast<int64_t>(entry_lines.size()) != manifest.entry_count)
        throw Error(ErrorKind::hash_mismatch,
                    "store '" + store_name + "' has " + std::to_string(entry_lines.size()) +
                        " entries, manifest says " + std::to_string(manifest.entry_count));

    std::map<std::string, Vector> vectors;
    for (const auto& line : split_lines(index_text)) {
        auto doc = parse_line(line, store_name + ".index");
        vectors[doc.at("entry_id").get<std::string>()] = doc.at("vector").get<Vector>();
    }
    if (vectors.size() != entry_lines.size())
        throw Error(ErrorKind::hash_mismatch,
                    "store '" + store_name + "' index out of step with entries");

    for (const auto& line : entry_lines) {
        Entry entry;
        entry_from_json(parse_line(line, store_name + ".jsonl"), entry);
        auto vec = vectors.find(entry.entry_id);
        if (vec == vectors.end())
            throw Error(ErrorKind::hash_mismatch,
                        "entry '" + entry.entry_id + "' missing from " + store_name + ".index");
        store.restore(std::move(entry), std::move(vec->second));
    }
}

}  // namespace

nlohmann::json StoreManifest::to_json() const {
    return {
        {"schema", schema},
        {"entry_count", entry_count},
        {"content_hash", content_hash},
        {"index_hash", index_hash},
        {"created", created},
        {"updated", updated},
        {"embedding_provider", embedding_provider},
        {"chat_provider", chat_provider},
        {"dim", dim},
        {"metric", "cosine"},
    };
}

StoreManifest StoreManifest::from_json(const nlohmann::json& doc) {
    const std::string schema = doc.value("schema", "");
    if (schema != "kb/1")
        throw Error(ErrorKind::unsupported_version, "store schema '" + schema + "' not supported");
    StoreManifest manifest;
    manifest.schema = schema;
    manifest.entry_count = doc.at("entry_count").get<int64_t>();
    manifest.content_hash = doc.at("content_hash").get<std::string>();
    manifest.index_hash = doc.at("index_hash").get<std::string>();
    manifest.created = doc.value("created", int64_t{1});
    manifest.updated = doc.value("updated", int64_t{1});
    manifest.embedding_provider = doc.value("embedding_provider", "");
    manifest.chat_provider = doc.value("chat_provider", "");
    manifest.dim = doc.value("dim", size_t{0});
    return manifest;
}

const std::vector<std::string>& kb_save_steps() {
    static const std::vector<std::string> steps = {
        "write_regulations_entries", "write_regulations_index", "write_regulations_manifest",
        "write_experience_entries",  "write_experience_index",  "write_experience_manifest",
        "write_cases_entries",       "write_cases_index",       "write_cases_manifest",
        "backup_previous",           "swap_new",
    };
    return steps;
}

std::map<std::string, StoreManifest> kb_save(const KnowledgeBases& kbs,
                                             const std::string& directory,
                                             const std::string& chat_provider,
                                             const FaultHook& fault_hook) {
    const fs::path dir(directory);
    const fs::path tmp(directory + ".tmp");
    const fs::path bak(directory + ".bak");

    std::error_code ec;
    fs::remove_all(tmp, ec);  // stale leftovers from an aborted save
    fs::create_directories(tmp);

    std::map<std::string, RenderedStore> rendered;
    rendered["regulations"] = render_store(kbs.regulations());
    rendered["experience"] = render_store(kbs.experience());
    rendered["cases"] = render_store(kbs.cases());
    const std::map<std::string, size_t> counts = {
        {"regulations", kbs.regulations().size()},
        {"experience", kbs.experience().size()},
        {"cases", kbs.cases().size()},
    };

    std::map<std::string, StoreManifest> manifests;
    for (const char* name : kStoreNames) {
        const auto& files = rendered.at(name);
        StoreManifest manifest;
        manifest.entry_count = static_cast<int64_t>(counts.at(name));
        manifest.content_hash = normalized_hash(files.entries_text);
        manifest.index_hash = normalized_hash(files.index_text);
        manifest.embedding_provider = kbs.provider()->id();
        manifest.chat_provider = chat_provider;
        manifest.dim = kbs.provider()->dim();
        if (auto prior = read_prior_manifest(dir, name)) {
            if (prior->content_hash == manifest.content_hash &&
                prior->index_hash == manifest.index_hash &&
                prior->embedding_provider == manifest.embedding_provider) {
                manifest = *prior;  // unchanged store keeps its version counters
            } else {
                manifest.created = prior->created;
                manifest.updated = prior->updated + 1;
            }
        }

        fire(fault_hook, std::string("write_") + name + "_entries");
        write_text_file((tmp / (std::string(name) + ".jsonl")).string(), files.entries_text);
        fire(fault_hook, std::string("write_") + name + "_index");
        write_text_file((tmp / (std::string(name) + ".index")).string(), files.index_text);
        fire(fault_hook, std::string("write_") + name + "_manifest");
        write_text_file((tmp / (std::string(name) + ".manifest")).string(),
                        manifest.to_json().dump(2) + "\n");
        manifests[name] = manifest;
    }

    fire(fault_hook, "backup_previous");
    if (fs::exists(dir)) {
        fs::remove_all(bak, ec);
        fs::rename(dir, bak, ec);
        if (ec) throw Error(ErrorKind::io, "cannot set aside previous store: " + ec.message());
    }
    fire(fault_hook, "swap_new");
    fs::rename(tmp, dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot promote new store version: " + ec.message());
    return manifests;
}

KnowledgeBases kb_load(const std::string& directory,
                       std::shared_ptr<EmbeddingProvider> provider) {
    fs::path dir(directory);
    if (!fs::exists(dir)) {
        const fs::path bak(directory + ".bak");
        if (fs::exists(bak)) {
            logging::warn("persistence",
                          "store '" + directory + "' missing; loading previous version from .bak");
            dir = bak;
        } else {
            throw Error(ErrorKind::missing_file, "no store at '" + directory + "'");
        }
    }

    std::map<std::string, StoreManifest> manifests;
    for (const char* name : kStoreNames) {
        const fs::path path = dir / (std::string(name) + ".manifest");
        if (!fs::exists(path))
            throw Error(ErrorKind::missing_file, "missing manifest '" + path.string() + "'");
        manifests[name] =
            StoreManifest::from_json(nlohmann::json::parse(read_text_file(path.string())));
    }

    std::string provider_id;
    for (const auto& [name, manifest] : manifests) {
        if (manifest.embedding_provider.empty()) continue;
        if (provider_id.empty())
            provider_id = manifest.embedding_provider;
        else if (provider_id != manifest.embedding_provider)
            throw Error(ErrorKind::config, "stores disagree on embedding provider");
    }
    if (provider) {
        if (!provider_id.empty() && provider->id() != provider_id)
            throw Error(ErrorKind::config, "store was built with provider '" + provider_id +
                                               "', not '" + provider->id() + "'");
    } else {
        provider = embedding_provider_from_id(provider_id);
        if (!provider)
            throw Error(ErrorKind::config, "cannot reconstruct embedding provider '" +
                                               provider_id + "'; pass one explicitly");
    }

    KnowledgeBases kbs(provider);
    load_store(kbs.regulations(), dir, "regulations", manifests.at("regulations"));
    load_store(kbs.experience(), dir, "experience", manifests.at("experience"));
    load_store(kbs.cases(), dir, "cases", manifests.at("cases"));
    return kbs;
}

std::string transcript_write(const TrialTranscript& transcript, const std::string& directory,
                             const std::string& run_id) {
    if (!transcript.verdict)
        throw Error(ErrorKind::contract,
                    "transcript '" + transcript.case_id + "' has no verdict; not archiving");
    fs::create_directories(directory);
    const std::string base = transcript.case_id + "-" + run_id;
    fs::path path = fs::path(directory) / (base + ".json");
    for (int suffix = 2; fs::exists(path); ++suffix)
        path = fs::path(directory) / (base + "-" + std::to_string(suffix) + ".json");
    write_text_file(path.string(), transcript_to_json(transcript).dump(2) + "\n");
    return path.string();
}

TrialTranscript transcript_read(const std::string& path) {
    return transcript_from_json(nlohmann::json::parse(read_text_file(path)));
}

StoreLock::StoreLock(const std::string& directory) : path_(directory + ".lock") {
    fs::path parent = fs::path(path_).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw Error(ErrorKind::lock_held,
                        "another writer holds '" + path_ + "'; remove it if that process is gone");
        throw Error(ErrorKind::io, "cannot create lock '" + path_ + "'");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] ssize_t written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
    held_ = true;
}

StoreLock::~StoreLock() { release(); }

void StoreLock::release() {
    if (!held_) return;
    std::error_code ec;
    fs::remove(path_, ec);
    held_ = false;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

}  // namespace agentcourt
