#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "docpipe/chunker.hpp"
#include "docpipe/partitioner.hpp"

namespace docpipe {

inline constexpr int kElementsVersion = 1; // "el_version"
inline constexpr int kChunksVersion = 1;   // "ck_version"

// One JSON object per line; field names are stable and versioned. Absent
// optional fields are omitted.
std::string element_to_jsonl_line(const Element& element);
Element element_from_jsonl_line(const std::string& line); // throws SchemaViolationError

std::string chunk_to_jsonl_line(const Chunk& chunk);
Chunk chunk_from_jsonl_line(const std::string& line); // throws SchemaViolationError

void write_elements_jsonl(std::ostream& out, const std::vector<Element>& elements);
std::vector<Element> read_elements_jsonl(std::istream& in);

void write_chunks_jsonl(std::ostream& out, const std::vector<Chunk>& chunks);
std::vector<Chunk> read_chunks_jsonl(std::istream& in);

} // namespace docpipe
