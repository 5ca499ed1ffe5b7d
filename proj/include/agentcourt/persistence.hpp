#pragma once

// Durable storage with atomic-swap updates. A knowledge-base directory holds
// one entries file, one vector index, and one manifest per store; saves build
// the next version in a sibling .tmp directory and promote it with two
// renames, keeping the previous version once as .bak. Loads verify manifests
// and content hashes before reconstructing stores, falling back to .bak when
// the primary directory is missing.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentcourt/kb.hpp"
#include "agentcourt/model.hpp"

namespace agentcourt {

struct StoreManifest {
    std::string schema = "kb/1";
    int64_t entry_count = 0;
    std::string content_hash;  // entries file, FNV-1a over normalized bytes
    std::string index_hash;    // index file, same hashing
    int64_t created = 1;       // logical version counters, not wall clock
    int64_t updated = 1;
    std::string embedding_provider;
    std::string chat_provider;
    size_t dim = 0;

    nlohmann::json to_json() const;
    static StoreManifest from_json(const nlohmann::json& doc);
};

// Interruption points of kb_save in execution order; the hook fires before
// each one, and throwing from it aborts the save right there. Used to verify
// that a crash at any point leaves the previous version loadable.
const std::vector<std::string>& kb_save_steps();
using FaultHook = std::function<void(const std::string& step)>;

// Writes all three stores under `directory` (entries + index + manifest per
// store) and atomically swaps the new version in. Unchanged stores keep their
// previous manifest verbatim, so re-saving identical content is
// byte-idempotent. Returns the manifests keyed by store name.
std::map<std::string, StoreManifest> kb_save(const KnowledgeBases& kbs,
                                             const std::string& directory,
                                             const std::string& chat_provider = "",
                                             const FaultHook& fault_hook = {});

// Reconstructs the three stores after verifying schema versions, line counts,
// and hashes. When `provider` is null it is rebuilt from the manifest's
// provider id; a provider that contradicts the manifest is refused since the
// persisted vectors would be in the wrong space.
KnowledgeBases kb_load(const std::string& directory,
                       std::shared_ptr<EmbeddingProvider> provider = nullptr);

// Canonical JSON dump of a finished trial; refuses transcripts without a
// verdict. Duplicate names get a numeric suffix. Returns the written path.
std::string transcript_write(const TrialTranscript& transcript, const std::string& directory,
                             const std::string& run_id);

TrialTranscript transcript_read(const std::string& path);

// Advisory single-writer lock: a sibling `<directory>.lock` file created
// exclusively. Construction fails with lock_held when another writer owns it.
class StoreLock {
public:
    explicit StoreLock(const std::string& directory);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

    void release();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    bool held_ = false;
};

// Small file helpers shared by the stores and the CLI.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace agentcourt
