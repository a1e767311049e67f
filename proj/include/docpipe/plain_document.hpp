#pragma once

#include <string>
#include <string_view>

#include "docpipe/document.hpp"

namespace docpipe {

inline constexpr int kPlainDocumentVersion = 1;

// Opens the PlainDocument JSON interchange format (versioned "pd_version": 1),
// the fixture/ingest path for tests and non-docx sources. The resulting tree
// is semantically identical to one read from a docx with the same content.
// Throws SchemaViolationError naming the offending field.
DocumentTree open_plain_document(std::string_view json_text,
                                 const std::string& fallback_source_name = "plain");

// Canonical serialization; open_plain_document(to_plain_document(t)) == t.
std::string to_plain_document(const DocumentTree& tree);

} // namespace docpipe
