#pragma once

#include <string>
#include <vector>

#include "docpipe/vector_index.hpp"

namespace docpipe {

struct RetrievalResult {
    std::string query;
    std::vector<ScoredMatch> matches;
    std::string context;
    int context_char_budget = 0;
};

// Embeds the query through the client and delegates to the index; a pure
// composition. Errors propagate from either side.
std::vector<ScoredMatch> retrieve(const std::string& query, int k, EmbeddingClient& client,
                                  const VectorIndex& index, const std::string& ns = "");

// Keeps only the first occurrence of each chunk text (by digest); opt-in.
std::vector<ScoredMatch> dedupe_by_text(const std::vector<ScoredMatch>& matches);

// Concatenates attribution blocks "[source_name § section_title]\n<text>\n"
// in match order, stopping before the first block that would push past the
// budget; blocks are never truncated mid-way. Budget counts Unicode scalar
// values.
std::string assemble_context(const std::vector<ScoredMatch>& matches, int budget_chars);

RetrievalResult run_retrieval(const std::string& query, int k, EmbeddingClient& client,
                              const VectorIndex& index, const std::string& ns,
                              int context_budget, bool dedupe = false);

} // namespace docpipe
