#pragma once

#include <optional>
#include <string>
#include <vector>

#include "docpipe/partitioner.hpp"

namespace docpipe {

struct ChunkingConfig {
    // Accepted for configuration compatibility; a no-op for docx input,
    // which has no page boundaries.
    bool multipage_sections = true;
    // 0 keeps every section separate, regardless of length.
    int combine_text_under_n_chars = 0;
    // Soft boundary: a chunk closes before growing past this.
    int new_after_n_chars = 4096;
    // Hard cap on chunk text length, in Unicode scalar values.
    int max_characters = 4096;

    void validate() const; // 0 <= combine <= new_after <= max, max > 0
};

enum class ChunkKind { Composite, Table, ImageDescription };

const char* to_string(ChunkKind kind);
std::optional<ChunkKind> chunk_kind_from_string(std::string_view name);

struct Chunk {
    std::string id; // digest of source_name, first seq, position and text
    std::string text;
    ChunkKind kind = ChunkKind::Composite;
    std::vector<int> element_seqs; // seqs of contributing elements, ascending
    std::optional<std::string> section_title;
    int char_count = 0; // Unicode scalar values in text
    std::optional<std::string> text_as_html; // table chunks only
    // True when this chunk continues its predecessor's section rather than
    // starting at a Title/Table/image boundary.
    bool continuation = false;
    std::string source_name;

    // What the embedder consumes: table chunks embed flat text and HTML as
    // one unit, everything else embeds text as-is.
    std::string embedding_text() const;
};

// Splits text into pieces of at most max_chars scalar values that
// concatenate back to the input exactly. Split point preference: last
// sentence terminator in the window, then last whitespace, then a hard cut.
std::vector<std::string> split_oversize(const std::string& text, int max_chars);

// Groups filtered, cleaned, enriched elements into chunks: a new section at
// every Title, tables and image-derived elements as their own chunks, soft
// continuation splits past new_after_n_chars, and a hard cap at
// max_characters enforced by split_oversize.
std::vector<Chunk> chunk_by_title(const std::vector<Element>& elements,
                                  const ChunkingConfig& cfg = {});

} // namespace docpipe
