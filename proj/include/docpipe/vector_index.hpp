#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "docpipe/embedder.hpp"

namespace docpipe {

using MetadataValue = std::variant<std::string, double, bool>;
using Metadata = std::map<std::string, MetadataValue>;

nlohmann::ordered_json metadata_to_json(const Metadata& md);
// Drops values that do not fit the flat string/number/bool model.
Metadata metadata_from_json(const nlohmann::ordered_json& j);

struct IndexRecord {
    std::string id; // unique within its namespace
    EmbeddingVector vector;
    Metadata metadata;
};

struct ScoredMatch {
    std::string id;
    double score = 0.0; // cosine, in [-1, 1]
    Metadata metadata;
};

struct IndexStats {
    int dimension = 0;
    std::map<std::string, std::size_t> namespace_counts;
    std::size_t total = 0;
};

// Exact cosine top-k store with remote-compatible semantics: upsert, query,
// delete and namespaces. Vectors are normalized once at upsert (raw norms
// kept in a sidecar), so a query is a full-scan dot product with 64-bit
// accumulation. Readers share; writers are exclusive.
class VectorIndex {
public:
    explicit VectorIndex(int dimension = kEmbeddingDimension);

    VectorIndex(VectorIndex&& other) noexcept;
    VectorIndex& operator=(VectorIndex&& other) noexcept;

    int dimension() const { return dimension_; }

    // Inserts new ids, replaces existing ones wholesale (vector + metadata).
    // Returns records written. Throws DimensionMismatchError; rejects
    // zero-magnitude vectors (cosine undefined).
    std::size_t upsert(std::vector<IndexRecord> records, const std::string& ns = "");

    // The top_k highest-cosine records passing the filter, exact, sorted by
    // descending score with ties broken by ascending id. Unknown namespaces
    // yield an empty result. The filter is an exact-match AND over its keys.
    std::vector<ScoredMatch> query(const EmbeddingVector& vector, int top_k,
                                   const std::string& ns = "",
                                   const Metadata* filter = nullptr) const;

    // Idempotent; returns the number of records actually removed.
    std::size_t remove(const std::vector<std::string>& ids, const std::string& ns = "");

    IndexStats stats() const;

    // Atomic snapshot to disk (temp file + rename); returns bytes written.
    std::uint64_t save(const std::filesystem::path& path) const;
    // Throws IndexFormatError (BadMagic, UnsupportedVersion, TruncatedFile,
    // ChecksumMismatch).
    static VectorIndex load(const std::filesystem::path& path);

private:
    struct StoredRecord {
        std::string id;
        std::vector<float> unit; // normalized copy; cosine reduces to dot
        float raw_norm = 0.0f;
        Metadata metadata;
    };
    struct NamespaceStore {
        std::vector<StoredRecord> records;
        std::unordered_map<std::string, std::size_t> by_id;
    };

    mutable std::shared_mutex mutex_;
    int dimension_;
    std::map<std::string, NamespaceStore> namespaces_;
};

// On-disk layout constants.
inline constexpr char kIndexMagic[] = {'V', 'I', 'D', 'X', '1'};
inline constexpr std::uint32_t kIndexVersion = 1;

} // namespace docpipe
