#pragma once

#include <string>

#include "docpipe/embedder.hpp"
#include "docpipe/enricher.hpp"
#include "docpipe/vector_index.hpp"

namespace docpipe {

struct ServiceOptions {
    std::string endpoint; // full URL, e.g. https://api.example.com/v1/embeddings
    std::string model;
    std::string api_key;         // resolved from the environment by the caller
    int timeout_seconds = 30;
    int max_retries = 2;         // on transport errors and 429/5xx responses
    int backoff_ms = 500;        // exponential backoff base
    enum class Auth { Bearer, ApiKeyHeader } auth = Auth::Bearer;
};

// Speaks the embeddings protocol: request {model, input: [strings]},
// response {data: [{index, embedding: [floats]}]}. Retries with exponential
// backoff and jitter; throws TransportError once retries are exhausted.
class HttpEmbeddingClient : public EmbeddingClient {
public:
    explicit HttpEmbeddingClient(ServiceOptions options, int dimension = kEmbeddingDimension);

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
    int dimension() const override { return dimension_; }

private:
    ServiceOptions options_;
    int dimension_;
};

// Speaks the vision protocol: request {model, prompt, image_base64,
// media_type}, response {text}. Throws VisionUnavailableError once retries
// are exhausted.
class HttpVisionClient : public VisionClient {
public:
    explicit HttpVisionClient(ServiceOptions options);

    std::string describe(std::span<const std::uint8_t> image_bytes,
                         const std::string& content_type, const std::string& prompt) override;

private:
    ServiceOptions options_;
};

// Stand-in wired when no vision service is configured: every call reports
// VisionUnavailableError, so images stay in place with an error note.
class UnavailableVisionClient : public VisionClient {
public:
    std::string describe(std::span<const std::uint8_t>, const std::string&,
                         const std::string&) override;
};

// Client for a hosted vector store with upsert/query/namespace semantics:
// POST <endpoint>/vectors/upsert with {"vectors": [{id, values, metadata}],
// "namespace"} and POST <endpoint>/query with {"vector", "topK",
// "namespace", "filter", "includeMetadata": true} returning {"matches":
// [{id, score, metadata}]}. Authentication uses the Api-Key header. Wired
// only when a remote endpoint is explicitly configured; offline pipelines
// never touch it.
class RemoteVectorIndexClient {
public:
    explicit RemoteVectorIndexClient(ServiceOptions options);

    std::size_t upsert(const std::vector<IndexRecord>& records, const std::string& ns = "");
    std::vector<ScoredMatch> query(const EmbeddingVector& vector, int top_k,
                                   const std::string& ns = "",
                                   const Metadata* filter = nullptr);

private:
    ServiceOptions options_;
};

} // namespace docpipe
