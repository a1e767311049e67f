#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docpipe/document.hpp"

namespace docpipe::test {

struct ZipEntry {
    std::string name;
    std::string data;
};

// Store-only zip writer, enough to assemble OOXML packages for fixtures.
std::string zip_store(const std::vector<ZipEntry>& entries);

struct RunSpec {
    std::string text;
    std::optional<double> size_pts;
    bool bold = false;
};

struct ParaOpts {
    std::optional<std::string> style_id;
    std::optional<int> outline_level;
    std::optional<double> size_pts; // direct run size for all runs
    bool bold = false;
    bool numbered = false;
};

// Assembles minimal but well-formed .docx packages in memory.
class DocxBuilder {
public:
    DocxBuilder& set_default_size(double pts);
    DocxBuilder& add_style(const std::string& id, const std::string& display_name,
                           std::optional<double> size_pts = std::nullopt,
                           std::optional<int> outline_level = std::nullopt, bool bold = false,
                           const std::string& based_on = "");

    DocxBuilder& add_paragraph(const std::string& text, const ParaOpts& opts = ParaOpts());
    DocxBuilder& add_paragraph_runs(const std::vector<RunSpec>& runs, const ParaOpts& opts = ParaOpts());
    // Paragraph consisting of a single inline image run.
    DocxBuilder& add_image(const std::string& file_name, const std::string& bytes);
    // Table from anchor cells; vMerge continuation cells are synthesized.
    // header_rows emits tblHeader flags; bold_first_row makes row-0 runs bold
    // without any flag.
    DocxBuilder& add_table(const TableBlock& table, int header_rows = 0,
                           bool bold_first_row = false);

    DocxBuilder& add_header_paragraph(const std::string& text);
    DocxBuilder& add_footer_paragraph(const std::string& text);

    // Extra raw body XML, for tests that need structures the helpers do not
    // cover (tracked changes, content controls, ...).
    DocxBuilder& add_raw_body_xml(const std::string& xml);

    std::string build() const;

private:
    struct MediaFile {
        std::string rid;
        std::string file_name;
        std::string bytes;
    };

    double default_size_pts_ = 11.0;
    std::string styles_xml_;
    std::string body_xml_;
    std::vector<std::string> header_paragraphs_;
    std::vector<std::string> footer_paragraphs_;
    std::vector<MediaFile> media_;
};

std::string xml_escape(const std::string& text);

} // namespace docpipe::test
