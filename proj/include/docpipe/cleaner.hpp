#pragma once

#include <set>
#include <string>
#include <vector>

#include "docpipe/partitioner.hpp"

namespace docpipe {

struct CleanConfig {
    // Glyphs stripped from the start of a string, one per pass.
    std::set<char32_t> bullet_chars{U'•', U'●', U'◦', U'▪', U'・',
                                    U'-',      U'–', U'—', U'*',      U'·'};
    bool collapse_fullwidth_space = true;

    void validate() const; // throws ConfigError when bullet_chars is empty
};

// Joins fragments separated by a lone newline when the next fragment starts
// with a lowercase latin letter or a CJK character and the previous one does
// not end in terminal punctuation. CJK joins use no space; blank-line
// paragraph breaks collapse to a single newline.
std::string group_broken_paragraphs(const std::string& text);

// Strips one leading bullet glyph plus adjacent whitespace; interior glyphs
// stay untouched.
std::string clean_bullets(const std::string& text, const CleanConfig& cfg = {});

// Collapses runs of spaces/tabs (and U+3000 when configured) to one space,
// trims the ends, preserves newlines.
std::string clean_extra_whitespace(const std::string& text, const CleanConfig& cfg = {});

// Composition of the three passes, applied until fixpoint.
std::string clean(const std::string& text, const CleanConfig& cfg = {});

// Applies clean() to Title and NarrativeText elements in place. Table text
// and image captions pass through untouched.
void clean_elements(std::vector<Element>& elements, const CleanConfig& cfg = {});

} // namespace docpipe
