#include "docpipe/embedder.hpp"

#include <cmath>
#include <deque>
#include <future>

#include "docpipe/digest.hpp"
#include "docpipe/errors.hpp"

namespace docpipe {

namespace {

// splitmix64: turns the digest into a well-mixed PRNG stream. The generator
// is pinned here so mock vectors are identical across platforms.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in (0, 1]; never returns 0 so log() below stays finite.
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

} // namespace

EmbeddingVector mock_embed(const std::string& text, std::uint64_t seed) {
    std::string digest = sha256_hex(std::to_string(seed) + "\x1f" + text, 16);
    std::uint64_t state = 0;
    for (char c : digest) state = state * 31 + static_cast<unsigned char>(c);
    SplitMix64 rng{state};

    // Gaussian draws via Box-Muller give a uniformly distributed direction
    // after normalization.
    EmbeddingVector v(kEmbeddingDimension);
    for (int i = 0; i < kEmbeddingDimension; i += 2) {
        double u1 = rng.next_unit();
        double u2 = rng.next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        v[i] = static_cast<float>(r * std::cos(2.0 * M_PI * u2));
        if (i + 1 < kEmbeddingDimension) {
            v[i + 1] = static_cast<float>(r * std::sin(2.0 * M_PI * u2));
        }
    }
    double norm_sq = 0.0;
    for (float x : v) norm_sq += static_cast<double>(x) * x;
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
        v[0] = 1.0f; // unreachable in practice; keeps the unit-norm contract
    } else {
        for (float& x : v) x = static_cast<float>(x / norm);
    }
    return v;
}

std::vector<EmbeddingVector> MockEmbeddingClient::embed_batch(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) out.push_back(mock_embed(text, seed_));
    return out;
}

EmbedResult embed_chunks(const std::vector<Chunk>& chunks, EmbeddingClient& client,
                         int batch_size, int max_in_flight) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_in_flight < 1) max_in_flight = 1;
    const int want_dim = client.dimension();

    EmbedResult result;
    std::vector<const Chunk*> pending;
    for (const Chunk& chunk : chunks) {
        if (chunk.embedding_text().empty()) {
            result.skipped_ids.push_back(chunk.id);
        } else {
            pending.push_back(&chunk);
        }
    }

    struct BatchJob {
        std::size_t start;
        std::future<std::vector<EmbeddingVector>> vectors;
    };
    std::deque<BatchJob> window;

    // Output assembly is in input order: the oldest batch commits before a
    // new one is launched, so a failed batch discards only its own results.
    auto commit_front = [&] {
        BatchJob job = std::move(window.front());
        window.pop_front();
        std::vector<EmbeddingVector> vectors = job.vectors.get();
        std::size_t end =
            std::min(pending.size(), job.start + static_cast<std::size_t>(batch_size));
        if (vectors.size() != end - job.start) {
            throw TransportError("embedding batch returned " + std::to_string(vectors.size()) +
                                 " vectors for " + std::to_string(end - job.start) + " inputs");
        }
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (static_cast<int>(vectors[i].size()) != want_dim) {
                throw DimensionMismatchError(static_cast<int>(vectors[i].size()), want_dim);
            }
            result.embedded.push_back(
                EmbeddedChunk{pending[job.start + i]->id, std::move(vectors[i])});
        }
    };

    for (std::size_t start = 0; start < pending.size();
         start += static_cast<std::size_t>(batch_size)) {
        std::size_t end = std::min(pending.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<std::string> texts;
        texts.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) texts.push_back(pending[i]->embedding_text());

        if (window.size() >= static_cast<std::size_t>(max_in_flight)) commit_front();
        window.push_back(BatchJob{
            start, std::async(std::launch::async, [&client, texts = std::move(texts)] {
                return client.embed_batch(texts);
            })});
    }
    while (!window.empty()) commit_front();
    return result;
}

} // namespace docpipe
