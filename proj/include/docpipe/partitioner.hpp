#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "docpipe/document.hpp"

namespace docpipe {

enum class ElementKind { Title, NarrativeText, Table, Image, Header, Footer, Uncategorized };

const char* to_string(ElementKind kind);
std::optional<ElementKind> element_kind_from_string(std::string_view name);

enum class Language { Latin, Cjk, Mixed };

struct ElementMetadata {
    std::string source_name;
    std::optional<std::string> text_as_html; // tables, filled by the enricher
    std::optional<std::string> image_ref;    // images, until caption substitution
    std::optional<std::string> caption;
    std::vector<std::string> section_path; // enclosing title texts, outermost first
    std::set<Language> languages;
    std::optional<std::string> derived_from; // "image" after substitution
    std::optional<std::string> error;

    bool operator==(const ElementMetadata&) const = default;
};

struct Element {
    ElementKind kind = ElementKind::Uncategorized;
    std::string text;
    ElementMetadata metadata;
    int seq = 0;

    // Source geometry for Table elements, kept in memory so the enricher can
    // render HTML; not part of the serialized form.
    std::optional<TableBlock> table;
};

// Title detection thresholds. The signal families are styling and text
// structure; the concrete values here are tunable configuration.
struct PartitionRules {
    std::vector<std::string> heading_style_patterns{"heading", "title", "标题"};
    double size_ratio_threshold = 1.2; // vs. modal body font size
    int max_title_words = 20;          // latin titles
    int max_title_chars_cjk = 40;      // cjk titles

    void validate() const; // throws ConfigError on nonsense values
};

// Classifies every block of the tree into typed elements, in order:
// header-region blocks, body blocks, footer-region blocks. Runs carrying an
// image anchor are split out of their paragraph as Image elements. Total:
// unclassifiable text becomes Uncategorized, never an error.
std::vector<Element> partition(const DocumentTree& tree, const PartitionRules& rules = {});

// Order-preserving removal of the given kinds; seq values of survivors are
// untouched. Default drop set mirrors the pipeline: headers and footers.
std::vector<Element> filter_elements(
    const std::vector<Element>& elements,
    const std::set<ElementKind>& drop = {ElementKind::Header, ElementKind::Footer});

// Language classes for a text: cjk when most characters are CJK, latin when
// most are latin letters; both plus mixed when the two scripts each exceed
// 10% of non-whitespace characters.
std::set<Language> detect_languages(const std::string& text);

// True when more than half of the non-whitespace characters are CJK.
bool is_mostly_cjk(const std::string& text);

} // namespace docpipe
