#include "docpipe/retriever.hpp"

#include <set>

#include "docpipe/digest.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/unicode.hpp"

namespace docpipe {

namespace {

std::string metadata_string(const Metadata& md, const std::string& key) {
    auto it = md.find(key);
    if (it == md.end()) return {};
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    return {};
}

} // namespace

std::vector<ScoredMatch> retrieve(const std::string& query, int k, EmbeddingClient& client,
                                  const VectorIndex& index, const std::string& ns) {
    if (k < 1) throw ConfigError("retrieval depth k must be >= 1");
    std::vector<EmbeddingVector> vectors = client.embed_batch({query});
    if (vectors.size() != 1) {
        throw TransportError("embedding client returned " + std::to_string(vectors.size()) +
                             " vectors for one query");
    }
    return index.query(vectors[0], k, ns);
}

std::vector<ScoredMatch> dedupe_by_text(const std::vector<ScoredMatch>& matches) {
    std::vector<ScoredMatch> out;
    std::set<std::string> seen;
    for (const ScoredMatch& m : matches) {
        std::string digest = sha256_hex(metadata_string(m.metadata, "text"), 32);
        if (seen.insert(digest).second) out.push_back(m);
    }
    return out;
}

std::string assemble_context(const std::vector<ScoredMatch>& matches, int budget_chars) {
    std::string context;
    std::size_t used = 0;
    for (const ScoredMatch& m : matches) {
        std::string source = metadata_string(m.metadata, "source_name");
        std::string title = metadata_string(m.metadata, "section_title");
        std::string header = title.empty() ? "[" + source + "]" : "[" + source + " § " + title + "]";
        std::string block = header + "\n" + metadata_string(m.metadata, "text") + "\n";
        std::size_t block_len = uni::length(block);
        if (used + block_len > static_cast<std::size_t>(budget_chars)) break;
        context += block;
        used += block_len;
    }
    return context;
}

RetrievalResult run_retrieval(const std::string& query, int k, EmbeddingClient& client,
                              const VectorIndex& index, const std::string& ns,
                              int context_budget, bool dedupe) {
    RetrievalResult out;
    out.query = query;
    out.matches = retrieve(query, k, client, index, ns);
    if (dedupe) out.matches = dedupe_by_text(out.matches);
    out.context_char_budget = context_budget;
    out.context = assemble_context(out.matches, context_budget);
    return out;
}

} // namespace docpipe
