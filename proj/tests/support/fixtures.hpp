#pragma once

#include <string>

#include "docpipe/document.hpp"

namespace docpipe::test {

// The wastewater characteristics table: two header rows, one of them with a
// colspan-2 "Effluent requirements" cell, four data rows.
TableBlock wastewater_table();
// Nine-row recyclates sensitivity table, four columns.
TableBlock recyclates_table();
// Chinese CCTV/QV/sonar applicability table, three data rows.
TableBlock cctv_table();
std::string cctv_table_caption();

// A bilingual .docx package: at least ten titled sections in English and
// Chinese, two tables, two captioned images, plus headers and footers.
std::string bilingual_docx();

} // namespace docpipe::test
