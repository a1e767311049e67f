#pragma once

#include <string>
#include <string_view>

#include "docpipe/document.hpp"

namespace docpipe {

// Opens a .docx package (zip of OOXML parts) and produces a DocumentTree
// with effective formatting resolved: run formatting overrides the style
// chain, which overrides document defaults. Header and footer parts are
// read separately and tagged with their region; they are never interleaved
// into body order (headers come first, footers last).
//
// Throws NotZipError, MissingDocumentPartError or MalformedXmlError; never
// aborts on malformed input.
DocumentTree open_docx(std::string_view bytes, const std::string& source_name);

} // namespace docpipe
