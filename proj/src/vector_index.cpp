#include "docpipe/vector_index.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "docpipe/digest.hpp"
#include "docpipe/errors.hpp"

namespace docpipe {

using ordered_json = nlohmann::ordered_json;

ordered_json metadata_to_json(const Metadata& md) {
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : md) {
        std::visit([&](const auto& v) { out[key] = v; }, value);
    }
    return out;
}

Metadata metadata_from_json(const ordered_json& j) {
    Metadata out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& v = it.value();
        if (v.is_boolean()) {
            out[it.key()] = v.get<bool>();
        } else if (v.is_number()) {
            out[it.key()] = v.get<double>();
        } else if (v.is_string()) {
            out[it.key()] = v.get<std::string>();
        }
        // Nested values are not representable in the flat metadata model.
    }
    return out;
}

namespace {

void append_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    ByteReader(const std::string& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

    std::size_t pos() const { return pos_; }

    void need(std::size_t n) const {
        if (pos_ + n > limit_) {
            throw IndexFormatError(IndexFormatError::Kind::TruncatedFile,
                                   "record data extends past end of file");
        }
    }
    std::uint16_t u16() {
        need(2);
        auto v = static_cast<std::uint16_t>(
            static_cast<unsigned char>(bytes_[pos_]) |
            (static_cast<unsigned char>(bytes_[pos_ + 1]) << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string v = bytes_.substr(pos_, n);
        pos_ += n;
        return v;
    }
    std::vector<float> floats(std::size_t n) {
        need(n * 4);
        std::vector<float> v(n);
        std::memcpy(v.data(), bytes_.data() + pos_, n * 4);
        pos_ += n * 4;
        return v;
    }

private:
    const std::string& bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

} // namespace

VectorIndex::VectorIndex(int dimension) : dimension_(dimension) {
    if (dimension <= 0) throw ConfigError("index dimension must be positive");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept
    : dimension_(other.dimension_), namespaces_(std::move(other.namespaces_)) {}

VectorIndex& VectorIndex::operator=(VectorIndex&& other) noexcept {
    if (this != &other) {
        std::unique_lock lock(mutex_);
        dimension_ = other.dimension_;
        namespaces_ = std::move(other.namespaces_);
    }
    return *this;
}

std::size_t VectorIndex::upsert(std::vector<IndexRecord> records, const std::string& ns) {
    // Validate before touching state so a failed batch leaves the index as
    // it was.
    std::vector<StoredRecord> prepared;
    prepared.reserve(records.size());
    for (IndexRecord& rec : records) {
        if (static_cast<int>(rec.vector.size()) != dimension_) {
            throw DimensionMismatchError(static_cast<int>(rec.vector.size()), dimension_);
        }
        if (rec.id.empty()) throw Error("record id must not be empty");
        double norm_sq = 0.0;
        for (float x : rec.vector) {
            if (!std::isfinite(x)) throw Error("vector components must be finite");
            norm_sq += static_cast<double>(x) * x;
        }
        if (norm_sq == 0.0) throw Error("zero-magnitude vector rejected: cosine undefined");
        double norm = std::sqrt(norm_sq);
        StoredRecord stored;
        stored.id = std::move(rec.id);
        stored.raw_norm = static_cast<float>(norm);
        stored.unit.resize(rec.vector.size());
        for (std::size_t i = 0; i < rec.vector.size(); ++i) {
            stored.unit[i] = static_cast<float>(rec.vector[i] / norm);
        }
        stored.metadata = std::move(rec.metadata);
        prepared.push_back(std::move(stored));
    }

    std::unique_lock lock(mutex_);
    NamespaceStore& store = namespaces_[ns];
    for (StoredRecord& rec : prepared) {
        auto it = store.by_id.find(rec.id);
        if (it != store.by_id.end()) {
            store.records[it->second] = std::move(rec);
        } else {
            store.by_id.emplace(rec.id, store.records.size());
            store.records.push_back(std::move(rec));
        }
    }
    return prepared.size();
}

std::vector<ScoredMatch> VectorIndex::query(const EmbeddingVector& vector, int top_k,
                                            const std::string& ns,
                                            const Metadata* filter) const {
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    if (static_cast<int>(vector.size()) != dimension_) {
        throw DimensionMismatchError(static_cast<int>(vector.size()), dimension_);
    }
    double norm_sq = 0.0;
    for (float x : vector) norm_sq += static_cast<double>(x) * x;
    if (norm_sq == 0.0) throw Error("zero-magnitude query vector rejected: cosine undefined");
    double inv_norm = 1.0 / std::sqrt(norm_sq);

    std::shared_lock lock(mutex_);
    auto ns_it = namespaces_.find(ns);
    if (ns_it == namespaces_.end()) return {}; // unknown namespace: empty, not an error

    auto passes = [&](const StoredRecord& rec) {
        if (!filter) return true;
        for (const auto& [key, value] : *filter) {
            auto it = rec.metadata.find(key);
            if (it == rec.metadata.end() || it->second != value) return false;
        }
        return true;
    };

    std::vector<ScoredMatch> matches;
    for (const StoredRecord& rec : ns_it->second.records) {
        if (!passes(rec)) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < rec.unit.size(); ++i) {
            dot += static_cast<double>(rec.unit[i]) * static_cast<double>(vector[i]);
        }
        matches.push_back(ScoredMatch{rec.id, dot * inv_norm, rec.metadata});
    }
    std::sort(matches.begin(), matches.end(), [](const ScoredMatch& a, const ScoredMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (matches.size() > static_cast<std::size_t>(top_k)) {
        matches.resize(static_cast<std::size_t>(top_k));
    }
    return matches;
}

std::size_t VectorIndex::remove(const std::vector<std::string>& ids, const std::string& ns) {
    std::unique_lock lock(mutex_);
    auto ns_it = namespaces_.find(ns);
    if (ns_it == namespaces_.end()) return 0;
    NamespaceStore& store = ns_it->second;

    std::size_t removed = 0;
    for (const std::string& id : ids) {
        auto it = store.by_id.find(id);
        if (it == store.by_id.end()) continue;
        std::size_t pos = it->second;
        store.records.erase(store.records.begin() + static_cast<std::ptrdiff_t>(pos));
        store.by_id.erase(it);
        for (auto& [other_id, other_pos] : store.by_id) {
            if (other_pos > pos) --other_pos;
        }
        ++removed;
    }
    return removed;
}

IndexStats VectorIndex::stats() const {
    std::shared_lock lock(mutex_);
    IndexStats out;
    out.dimension = dimension_;
    for (const auto& [name, store] : namespaces_) {
        out.namespace_counts[name] = store.records.size();
        out.total += store.records.size();
    }
    return out;
}

std::uint64_t VectorIndex::save(const std::filesystem::path& path) const {
    std::string bytes;
    {
        std::shared_lock lock(mutex_);
        bytes.append(kIndexMagic, sizeof(kIndexMagic));
        append_u32(bytes, kIndexVersion);
        append_u32(bytes, static_cast<std::uint32_t>(dimension_));
        std::uint64_t total = 0;
        for (const auto& [name, store] : namespaces_) total += store.records.size();
        append_u64(bytes, total);

        for (const auto& [name, store] : namespaces_) {
            for (const StoredRecord& rec : store.records) {
                append_u16(bytes, static_cast<std::uint16_t>(rec.id.size()));
                bytes += rec.id;
                // The metadata JSON is an envelope carrying the namespace
                // alongside the user metadata.
                ordered_json env;
                env["ns"] = name;
                env["md"] = metadata_to_json(rec.metadata);
                std::string md = env.dump();
                append_u32(bytes, static_cast<std::uint32_t>(md.size()));
                bytes += md;
                std::size_t off = bytes.size();
                bytes.resize(off + rec.unit.size() * 4);
                std::memcpy(bytes.data() + off, rec.unit.data(), rec.unit.size() * 4);
            }
        }
    }
    append_u64(bytes, fnv1a64(bytes));

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    return bytes.size();
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IndexFormatError(IndexFormatError::Kind::TruncatedFile,
                               "cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kIndexMagic) ||
        std::memcmp(bytes.data(), kIndexMagic, sizeof(kIndexMagic)) != 0) {
        throw IndexFormatError(IndexFormatError::Kind::BadMagic, "bad magic in " + path.string());
    }
    constexpr std::size_t kHeaderSize = sizeof(kIndexMagic) + 4 + 4 + 8;
    if (bytes.size() < kHeaderSize + 8) {
        throw IndexFormatError(IndexFormatError::Kind::TruncatedFile,
                               "file shorter than header + checksum");
    }

    std::size_t payload_end = bytes.size() - 8;
    Fnv1a64 hash;
    hash.update(bytes.data(), payload_end);
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) {
        stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[payload_end + i]))
                  << (8 * i);
    }
    if (hash.value() != stored) {
        throw IndexFormatError(IndexFormatError::Kind::ChecksumMismatch,
                               "checksum mismatch in " + path.string());
    }

    ByteReader reader(bytes, payload_end);
    reader.str(sizeof(kIndexMagic)); // magic, already checked
    std::uint32_t version = reader.u32();
    if (version != kIndexVersion) {
        throw IndexFormatError(IndexFormatError::Kind::UnsupportedVersion,
                               "unsupported version " + std::to_string(version));
    }
    auto dimension = static_cast<int>(reader.u32());
    std::uint64_t count = reader.u64();

    VectorIndex index(dimension);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint16_t id_len = reader.u16();
        std::string id = reader.str(id_len);
        std::uint32_t md_len = reader.u32();
        std::string md_json = reader.str(md_len);
        std::vector<float> unit = reader.floats(static_cast<std::size_t>(dimension));

        std::string ns;
        Metadata metadata;
        try {
            ordered_json env = ordered_json::parse(md_json);
            if (env.contains("ns") && env["ns"].is_string()) ns = env["ns"].get<std::string>();
            if (env.contains("md") && env["md"].is_object()) {
                metadata = metadata_from_json(env["md"]);
            }
        } catch (const nlohmann::json::parse_error&) {
            throw IndexFormatError(IndexFormatError::Kind::TruncatedFile,
                                   "unreadable metadata in record " + std::to_string(i));
        }

        StoredRecord rec;
        rec.id = std::move(id);
        rec.unit = std::move(unit);
        rec.raw_norm = 1.0f; // raw norms are not persisted; stored vectors are unit
        rec.metadata = std::move(metadata);
        NamespaceStore& store = index.namespaces_[ns];
        auto it = store.by_id.find(rec.id);
        if (it != store.by_id.end()) {
            store.records[it->second] = std::move(rec);
        } else {
            store.by_id.emplace(rec.id, store.records.size());
            store.records.push_back(std::move(rec));
        }
    }
    if (reader.pos() != payload_end) {
        throw IndexFormatError(IndexFormatError::Kind::TruncatedFile,
                               "trailing bytes after last record");
    }
    return index;
}

} // namespace docpipe
