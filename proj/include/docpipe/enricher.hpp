#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docpipe/document.hpp"
#include "docpipe/partitioner.hpp"

namespace docpipe {

// Flat text form of a table: cells joined by a single space, rows by a
// newline; spanned cells appear once, at their anchor position.
std::string render_table_text(const TableBlock& table);

// HTML form: <table> with <thead> for header rows and <tbody> for the rest,
// colspan/rowspan attributes exactly when a span exceeds 1, cell text
// escaped (&, <, >). A caption, when given, becomes a text line preceding
// <table> inside a <pre> wrapper.
std::string render_table_html(const TableBlock& table,
                              const std::optional<std::string>& caption = std::nullopt);

struct CaptionRule {
    // Leading markers; a match requires the marker followed by a digit
    // ("Table 1", "表1", "Tab.3", "图 3-1").
    std::vector<std::string> table_patterns{"table", "tab.", "表"};
    std::vector<std::string> figure_patterns{"fig.", "figure", "图"};
    int search_window = 2; // elements, both directions

    void validate() const;
};

bool matches_caption_pattern(const std::string& text, const std::vector<std::string>& patterns);

// Gives each Table/Image element a metadata.caption from the nearest
// pattern-matching NarrativeText within the window; on a distance tie the
// preceding element wins. Caption elements stay in the sequence. Also fills
// metadata.text_as_html for Table elements.
void associate_captions(std::vector<Element>& elements, const CaptionRule& rule = {});

class VisionClient {
public:
    virtual ~VisionClient() = default;
    // Returns a plain-text description. Throws VisionUnavailableError when
    // the service cannot be reached.
    virtual std::string describe(std::span<const std::uint8_t> image_bytes,
                                 const std::string& content_type, const std::string& prompt) = 0;
};

// Deterministic offline stand-in: the description is "IMG-DESC:" followed by
// a digest of the image content. Prompts are recorded for inspection.
class MockVisionClient : public VisionClient {
public:
    std::string describe(std::span<const std::uint8_t> image_bytes,
                         const std::string& content_type, const std::string& prompt) override;

    std::vector<std::string> prompts_seen() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> prompts_;
};

inline constexpr const char* kVisionPromptVersion = "v1";

// The versioned prompt sent to the vision service; includes the caption
// when one is known.
std::string build_vision_prompt(const std::optional<std::string>& caption);

// Replaces each Image element in place (same seq) with a NarrativeText
// element holding the client's description; the original kind is recorded as
// metadata.derived_from = "image". On VisionUnavailableError the element is
// kept as Image with metadata.error set and processing continues. Up to
// max_in_flight client calls run concurrently; substitutions commit in
// document order.
void describe_images(std::vector<Element>& elements,
                     const std::map<std::string, MediaItem>& media, VisionClient& client,
                     int max_in_flight = 4);

} // namespace docpipe
