#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "docpipe/chunker.hpp"

namespace docpipe {

inline constexpr int kEmbeddingDimension = 1536;

// A fixed-width real vector; components are finite 32-bit floats.
using EmbeddingVector = std::vector<float>;

class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    // One vector per input text, positionally aligned.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
    virtual int dimension() const = 0;
};

// Deterministic offline client: identical text maps to identical unit
// vectors, derived from a digest of (seed, text).
EmbeddingVector mock_embed(const std::string& text, std::uint64_t seed);

class MockEmbeddingClient : public EmbeddingClient {
public:
    explicit MockEmbeddingClient(std::uint64_t seed = 0) : seed_(seed) {}

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
    int dimension() const override { return kEmbeddingDimension; }

private:
    std::uint64_t seed_;
};

struct EmbeddedChunk {
    std::string chunk_id;
    EmbeddingVector vector;
};

struct EmbedResult {
    std::vector<EmbeddedChunk> embedded;     // one per non-empty chunk, in order
    std::vector<std::string> skipped_ids;    // chunks with empty embedding text
};

// Batches chunk texts through the client; batching is invisible in the
// output and results keep input order even with up to max_in_flight batches
// running concurrently. Dimension is checked at the boundary on every
// returned vector. Throws DimensionMismatchError or TransportError (after
// client retries).
EmbedResult embed_chunks(const std::vector<Chunk>& chunks, EmbeddingClient& client,
                         int batch_size, int max_in_flight = 4);

} // namespace docpipe
