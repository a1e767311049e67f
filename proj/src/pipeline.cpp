#include "docpipe/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "docpipe/docx_reader.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/jsonl.hpp"
#include "docpipe/net.hpp"
#include "docpipe/plain_document.hpp"

namespace docpipe {

namespace {

std::string env_or_empty(const std::string& name) {
    const char* value = name.empty() ? nullptr : std::getenv(name.c_str());
    return value ? value : std::string();
}

std::string lower_ext(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

} // namespace

void PipelineConfig::validate() const {
    partition.validate();
    clean.validate();
    captions.validate();
    chunking.validate();
    if (embedding.batch_size < 1) throw ConfigError("embedding.batch_size must be >= 1");
    if (retrieval.top_k < 1) throw ConfigError("retrieval.top_k must be >= 1");
    if (retrieval.context_budget < 0) throw ConfigError("retrieval.context_budget must be >= 0");
    if (jobs < 0) throw ConfigError("jobs must be >= 0");
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

DocumentTree open_input_file(const std::filesystem::path& path) {
    std::string bytes = read_file_bytes(path);
    std::string ext = lower_ext(path);
    std::string source_name = path.filename().string();
    if (ext == ".json") {
        return open_plain_document(bytes, source_name);
    }
    return open_docx(bytes, source_name);
}

std::vector<Element> run_parse_stages(const DocumentTree& tree, const PipelineConfig& cfg,
                                      VisionClient& vision) {
    std::vector<Element> elements = partition(tree, cfg.partition);
    elements = filter_elements(elements);
    clean_elements(elements, cfg.clean);
    associate_captions(elements, cfg.captions);
    describe_images(elements, tree.media, vision, cfg.vision.max_in_flight);
    return elements;
}

std::unique_ptr<EmbeddingClient> make_embedding_client(const PipelineConfig& cfg) {
    if (cfg.embedding.mock) {
        return std::make_unique<MockEmbeddingClient>(cfg.embedding.mock_seed);
    }
    ServiceOptions options;
    options.endpoint = cfg.embedding.endpoint;
    options.model = cfg.embedding.model;
    options.api_key = env_or_empty(cfg.embedding.key_env);
    options.timeout_seconds = cfg.embedding.timeout_seconds;
    options.max_retries = cfg.embedding.max_retries;
    return std::make_unique<HttpEmbeddingClient>(std::move(options));
}

std::unique_ptr<VisionClient> make_vision_client(const PipelineConfig& cfg) {
    // --mock switches the whole pipeline offline, vision included.
    if (cfg.embedding.mock) return std::make_unique<MockVisionClient>();
    if (cfg.vision.endpoint.empty()) return std::make_unique<UnavailableVisionClient>();
    ServiceOptions options;
    options.endpoint = cfg.vision.endpoint;
    options.model = cfg.vision.model;
    options.api_key = env_or_empty(cfg.vision.key_env);
    options.timeout_seconds = cfg.vision.timeout_seconds;
    options.max_retries = cfg.vision.max_retries;
    return std::make_unique<HttpVisionClient>(std::move(options));
}

IndexRecord chunk_index_record(const Chunk& chunk, EmbeddingVector vector) {
    IndexRecord record;
    record.id = chunk.id;
    record.vector = std::move(vector);
    record.metadata["text"] = chunk.text;
    record.metadata["source_name"] = chunk.source_name;
    if (chunk.section_title) record.metadata["section_title"] = *chunk.section_title;
    record.metadata["kind"] = std::string(to_string(chunk.kind));
    record.metadata["char_count"] = static_cast<double>(chunk.char_count);
    return record;
}

PipelineOutcome run_pipeline(const std::vector<std::filesystem::path>& inputs,
                             const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    auto embedding_client = make_embedding_client(cfg);
    auto vision_client = make_vision_client(cfg);

    struct DocumentResult {
        std::vector<Element> elements;
        std::vector<Chunk> chunks;
    };

    // Documents are processed by a bounded worker pool; results commit in
    // input order so outputs are deterministic.
    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    auto process_one = [&](const std::filesystem::path& path) {
        DocumentResult result;
        DocumentTree tree = open_input_file(path);
        result.elements = run_parse_stages(tree, cfg, *vision_client);
        result.chunks = chunk_by_title(result.elements, cfg.chunking);
        return result;
    };

    std::vector<Element> all_elements;
    std::vector<Chunk> all_chunks;
    std::deque<std::future<DocumentResult>> window;
    auto commit_front = [&] {
        DocumentResult result = window.front().get();
        window.pop_front();
        all_elements.insert(all_elements.end(),
                            std::make_move_iterator(result.elements.begin()),
                            std::make_move_iterator(result.elements.end()));
        all_chunks.insert(all_chunks.end(), std::make_move_iterator(result.chunks.begin()),
                          std::make_move_iterator(result.chunks.end()));
    };
    for (const auto& input : inputs) {
        if (window.size() >= jobs) commit_front();
        window.push_back(std::async(std::launch::async, process_one, input));
    }
    while (!window.empty()) commit_front();

    PipelineOutcome outcome;
    outcome.documents = inputs.size();
    outcome.elements = all_elements.size();
    outcome.chunks = all_chunks.size();

    {
        std::ostringstream buffer;
        write_elements_jsonl(buffer, all_elements);
        outcome.elements_path = out_dir / "elements.jsonl";
        atomic_write_file(outcome.elements_path, std::move(buffer).str());
    }
    {
        std::ostringstream buffer;
        write_chunks_jsonl(buffer, all_chunks);
        outcome.chunks_path = out_dir / "chunks.jsonl";
        atomic_write_file(outcome.chunks_path, std::move(buffer).str());
    }

    EmbedResult embedded = embed_chunks(all_chunks, *embedding_client, cfg.embedding.batch_size,
                                        cfg.embedding.max_in_flight);
    outcome.embedded = embedded.embedded.size();
    outcome.skipped_chunks = embedded.skipped_ids.size();

    VectorIndex index = std::filesystem::exists(cfg.index.path)
                            ? VectorIndex::load(cfg.index.path)
                            : VectorIndex(embedding_client->dimension());

    std::vector<IndexRecord> records;
    records.reserve(embedded.embedded.size());
    std::size_t cursor = 0;
    for (const Chunk& chunk : all_chunks) {
        if (cursor < embedded.embedded.size() && embedded.embedded[cursor].chunk_id == chunk.id) {
            records.push_back(chunk_index_record(chunk, std::move(embedded.embedded[cursor].vector)));
            ++cursor;
        }
    }
    outcome.upserted = index.upsert(std::move(records), cfg.index.ns);
    index.save(cfg.index.path);
    outcome.index_path = cfg.index.path;
    return outcome;
}

void write_embeddings_manifest(const std::filesystem::path& manifest_path,
                               const EmbedResult& result, const std::string& model,
                               int dimension) {
    std::string vectors_name = manifest_path.filename().string() + ".f32";

    std::string raw;
    raw.resize(result.embedded.size() * static_cast<std::size_t>(dimension) * 4);
    std::size_t off = 0;
    for (const EmbeddedChunk& item : result.embedded) {
        std::memcpy(raw.data() + off, item.vector.data(), item.vector.size() * 4);
        off += item.vector.size() * 4;
    }
    std::filesystem::path vectors_path = manifest_path.parent_path() / vectors_name;
    atomic_write_file(vectors_path, raw);

    nlohmann::ordered_json manifest;
    manifest["em_version"] = 1;
    manifest["model"] = model;
    manifest["dimension"] = dimension;
    manifest["count"] = result.embedded.size();
    manifest["vectors_file"] = vectors_name;
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (const EmbeddedChunk& item : result.embedded) ids.push_back(item.chunk_id);
    manifest["ids"] = std::move(ids);
    manifest["skipped_ids"] = result.skipped_ids;
    atomic_write_file(manifest_path, manifest.dump(2) + "\n");
}

EmbedResult read_embeddings_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::ordered_json manifest;
    try {
        manifest = nlohmann::ordered_json::parse(read_file_bytes(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaViolationError(std::string("embeddings manifest: ") + e.what());
    }
    if (!manifest.contains("em_version") || manifest["em_version"].get<int>() != 1) {
        throw SchemaViolationError("embeddings manifest em_version");
    }
    int dimension = manifest["dimension"].get<int>();
    auto count = manifest["count"].get<std::size_t>();
    std::string vectors_name = manifest["vectors_file"].get<std::string>();

    std::string raw = read_file_bytes(manifest_path.parent_path() / vectors_name);
    if (raw.size() != count * static_cast<std::size_t>(dimension) * 4) {
        throw SchemaViolationError("embeddings vector file size mismatch");
    }

    EmbedResult result;
    std::size_t off = 0;
    for (const auto& id : manifest["ids"]) {
        EmbeddedChunk item;
        item.chunk_id = id.get<std::string>();
        item.vector.resize(static_cast<std::size_t>(dimension));
        std::memcpy(item.vector.data(), raw.data() + off,
                    static_cast<std::size_t>(dimension) * 4);
        off += static_cast<std::size_t>(dimension) * 4;
        result.embedded.push_back(std::move(item));
    }
    if (manifest.contains("skipped_ids")) {
        for (const auto& id : manifest["skipped_ids"]) {
            result.skipped_ids.push_back(id.get<std::string>());
        }
    }
    return result;
}

} // namespace docpipe
