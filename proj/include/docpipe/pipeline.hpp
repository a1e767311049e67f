#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "docpipe/chunker.hpp"
#include "docpipe/cleaner.hpp"
#include "docpipe/embedder.hpp"
#include "docpipe/enricher.hpp"
#include "docpipe/partitioner.hpp"
#include "docpipe/vector_index.hpp"

namespace docpipe {

struct EmbeddingOptions {
    std::string endpoint = "https://api.openai.com/v1/embeddings";
    std::string model = "text-embedding-ada-002";
    std::string key_env = "OPENAI_API_KEY"; // secrets come from the environment only
    int batch_size = 64;
    bool mock = false; // offline deterministic clients for the whole pipeline
    std::uint64_t mock_seed = 0;
    int timeout_seconds = 30;
    int max_retries = 2;
    int max_in_flight = 4;
};

struct VisionOptions {
    std::string endpoint; // empty: vision unavailable, images keep an error note
    std::string model = "gpt-4-vision-preview";
    std::string key_env = "OPENAI_API_KEY";
    int timeout_seconds = 60;
    int max_retries = 2;
    int max_in_flight = 4;
};

struct IndexOptions {
    std::filesystem::path path = "index.vidx";
    std::string ns; // namespace, default ""
};

struct RetrievalOptions {
    int top_k = 5;
    int context_budget = 8000;
    bool dedupe = false;
};

struct PipelineConfig {
    PartitionRules partition;
    CleanConfig clean;
    CaptionRule captions;
    ChunkingConfig chunking;
    EmbeddingOptions embedding;
    VisionOptions vision;
    IndexOptions index;
    RetrievalOptions retrieval;
    int jobs = 0; // worker pool size for documents; 0 = hardware concurrency

    void validate() const;
};

// Dispatches on extension: .docx packages vs PlainDocument .json.
DocumentTree open_input_file(const std::filesystem::path& path);

// partition -> filter headers/footers -> clean -> captions + table HTML ->
// image substitution. This is what the `parse` command serializes.
std::vector<Element> run_parse_stages(const DocumentTree& tree, const PipelineConfig& cfg,
                                      VisionClient& vision);

std::unique_ptr<EmbeddingClient> make_embedding_client(const PipelineConfig& cfg);
std::unique_ptr<VisionClient> make_vision_client(const PipelineConfig& cfg);

struct PipelineOutcome {
    std::size_t documents = 0;
    std::size_t elements = 0;
    std::size_t chunks = 0;
    std::size_t embedded = 0;
    std::size_t skipped_chunks = 0;
    std::size_t upserted = 0;
    std::filesystem::path elements_path;
    std::filesystem::path chunks_path;
    std::filesystem::path index_path;
};

// parse -> clean -> enrich -> chunk -> embed -> upsert for every input, with
// per-document parallelism and deterministic input-order output. Stage files
// land in out_dir (elements.jsonl, chunks.jsonl); the index goes to
// cfg.index.path. All files are written atomically.
PipelineOutcome run_pipeline(const std::vector<std::filesystem::path>& inputs,
                             const PipelineConfig& cfg, const std::filesystem::path& out_dir);

// Embedding manifest pair: <path> (JSON) plus <path>.f32 (raw little-endian
// float32, count x dimension).
void write_embeddings_manifest(const std::filesystem::path& manifest_path,
                               const EmbedResult& result, const std::string& model,
                               int dimension);
EmbedResult read_embeddings_manifest(const std::filesystem::path& manifest_path);

// Whole-file helpers; writes go through a temp file + rename.
std::string read_file_bytes(const std::filesystem::path& path);
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

// Builds the index record for a chunk: vector plus flat metadata (text,
// source_name, section_title, kind, char_count).
IndexRecord chunk_index_record(const Chunk& chunk, EmbeddingVector vector);

} // namespace docpipe
