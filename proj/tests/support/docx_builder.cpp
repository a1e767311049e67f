#include "support/docx_builder.hpp"

#include <zlib.h>

#include <cstring>

namespace docpipe::test {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

} // namespace

std::string zip_store(const std::vector<ZipEntry>& entries) {
    std::string out;
    struct CentralRecord {
        std::string name;
        std::uint32_t crc;
        std::uint32_t size;
        std::uint32_t offset;
    };
    std::vector<CentralRecord> central;

    for (const ZipEntry& entry : entries) {
        auto crc = static_cast<std::uint32_t>(
            ::crc32(0L, reinterpret_cast<const Bytef*>(entry.data.data()),
                    static_cast<uInt>(entry.data.size())));
        central.push_back(CentralRecord{entry.name, crc,
                                        static_cast<std::uint32_t>(entry.data.size()),
                                        static_cast<std::uint32_t>(out.size())});
        put_u32(out, 0x04034b50);
        put_u16(out, 20);                                        // version needed
        put_u16(out, 0);                                         // flags
        put_u16(out, 0);                                         // method: stored
        put_u16(out, 0);                                         // mod time
        put_u16(out, 0);                                         // mod date
        put_u32(out, crc);
        put_u32(out, static_cast<std::uint32_t>(entry.data.size())); // compressed
        put_u32(out, static_cast<std::uint32_t>(entry.data.size())); // uncompressed
        put_u16(out, static_cast<std::uint16_t>(entry.name.size()));
        put_u16(out, 0); // extra
        out += entry.name;
        out += entry.data;
    }

    std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
    for (const CentralRecord& rec : central) {
        put_u32(out, 0x02014b50);
        put_u16(out, 20); // version made by
        put_u16(out, 20); // version needed
        put_u16(out, 0);  // flags
        put_u16(out, 0);  // method
        put_u16(out, 0);  // time
        put_u16(out, 0);  // date
        put_u32(out, rec.crc);
        put_u32(out, rec.size);
        put_u32(out, rec.size);
        put_u16(out, static_cast<std::uint16_t>(rec.name.size()));
        put_u16(out, 0); // extra
        put_u16(out, 0); // comment
        put_u16(out, 0); // disk
        put_u16(out, 0); // internal attrs
        put_u32(out, 0); // external attrs
        put_u32(out, rec.offset);
        out += rec.name;
    }
    std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

    put_u32(out, 0x06054b50);
    put_u16(out, 0); // disk
    put_u16(out, 0); // cd start disk
    put_u16(out, static_cast<std::uint16_t>(central.size()));
    put_u16(out, static_cast<std::uint16_t>(central.size()));
    put_u32(out, cd_size);
    put_u32(out, cd_offset);
    put_u16(out, 0); // comment length
    return out;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

namespace {

std::string run_props_xml(std::optional<double> size_pts, bool bold) {
    if (!size_pts && !bold) return {};
    std::string out = "<w:rPr>";
    if (bold) out += "<w:b/>";
    if (size_pts) {
        out += "<w:sz w:val=\"" + std::to_string(static_cast<int>(*size_pts * 2)) + "\"/>";
    }
    out += "</w:rPr>";
    return out;
}

std::string run_xml(const RunSpec& run) {
    std::string out = "<w:r>";
    out += run_props_xml(run.size_pts, run.bold);
    out += "<w:t xml:space=\"preserve\">" + xml_escape(run.text) + "</w:t></w:r>";
    return out;
}

std::string simple_paragraph_xml(const std::string& text, bool bold = false) {
    std::string props = bold ? "<w:rPr><w:b/></w:rPr>" : "";
    return "<w:p><w:r>" + props + "<w:t xml:space=\"preserve\">" + xml_escape(text) +
           "</w:t></w:r></w:p>";
}

} // namespace

DocxBuilder& DocxBuilder::set_default_size(double pts) {
    default_size_pts_ = pts;
    return *this;
}

DocxBuilder& DocxBuilder::add_style(const std::string& id, const std::string& display_name,
                                    std::optional<double> size_pts,
                                    std::optional<int> outline_level, bool bold,
                                    const std::string& based_on) {
    styles_xml_ += "<w:style w:type=\"paragraph\" w:styleId=\"" + xml_escape(id) + "\">";
    styles_xml_ += "<w:name w:val=\"" + xml_escape(display_name) + "\"/>";
    if (!based_on.empty()) styles_xml_ += "<w:basedOn w:val=\"" + xml_escape(based_on) + "\"/>";
    if (outline_level) {
        styles_xml_ +=
            "<w:pPr><w:outlineLvl w:val=\"" + std::to_string(*outline_level) + "\"/></w:pPr>";
    }
    std::string rpr = run_props_xml(size_pts, bold);
    if (!rpr.empty()) styles_xml_ += rpr;
    styles_xml_ += "</w:style>";
    return *this;
}

DocxBuilder& DocxBuilder::add_paragraph(const std::string& text, const ParaOpts& opts) {
    return add_paragraph_runs({RunSpec{text, opts.size_pts, opts.bold}}, opts);
}

DocxBuilder& DocxBuilder::add_paragraph_runs(const std::vector<RunSpec>& runs,
                                             const ParaOpts& opts) {
    std::string out = "<w:p>";
    if (opts.style_id || opts.outline_level || opts.numbered) {
        out += "<w:pPr>";
        if (opts.style_id) out += "<w:pStyle w:val=\"" + xml_escape(*opts.style_id) + "\"/>";
        if (opts.outline_level) {
            out += "<w:outlineLvl w:val=\"" + std::to_string(*opts.outline_level) + "\"/>";
        }
        if (opts.numbered) out += "<w:numPr><w:numId w:val=\"1\"/></w:numPr>";
        out += "</w:pPr>";
    }
    for (const RunSpec& run : runs) out += run_xml(run);
    out += "</w:p>";
    body_xml_ += out;
    return *this;
}

DocxBuilder& DocxBuilder::add_image(const std::string& file_name, const std::string& bytes) {
    std::string rid = "rIdImg" + std::to_string(media_.size() + 1);
    media_.push_back(MediaFile{rid, file_name, bytes});
    body_xml_ += "<w:p><w:r><w:drawing><wp:inline><a:graphic><a:graphicData>"
                 "<pic:pic><pic:blipFill><a:blip r:embed=\"" +
                 rid +
                 "\"/></pic:blipFill></pic:pic>"
                 "</a:graphicData></a:graphic></wp:inline></w:drawing></w:r></w:p>";
    return *this;
}

DocxBuilder& DocxBuilder::add_table(const TableBlock& table, int header_rows,
                                    bool bold_first_row) {
    ExpandedGrid grid = expand_grid(table);

    // Anchor positions in the expanded matrix, row-major first occurrence.
    std::vector<std::pair<std::size_t, std::size_t>> anchor_pos(grid.anchors.size(),
                                                                {SIZE_MAX, SIZE_MAX});
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            int idx = grid.matrix[r][c];
            if (idx >= 0 && anchor_pos[static_cast<std::size_t>(idx)].first == SIZE_MAX) {
                anchor_pos[static_cast<std::size_t>(idx)] = {r, c};
            }
        }
    }

    std::string out = "<w:tbl><w:tblPr>";
    if (table.caption_hint) {
        out += "<w:tblCaption w:val=\"" + xml_escape(*table.caption_hint) + "\"/>";
    }
    out += "</w:tblPr>";
    for (std::size_t r = 0; r < grid.rows; ++r) {
        out += "<w:tr>";
        if (r < static_cast<std::size_t>(header_rows)) {
            out += "<w:trPr><w:tblHeader/></w:trPr>";
        }
        for (std::size_t c = 0; c < grid.cols; ++c) {
            int idx = grid.matrix[r][c];
            if (idx < 0) continue;
            const auto [ar, ac] = anchor_pos[static_cast<std::size_t>(idx)];
            if (ac != c) continue; // interior of a colspan
            const Cell& anchor = grid.anchors[static_cast<std::size_t>(idx)];
            out += "<w:tc><w:tcPr>";
            if (anchor.col_span > 1) {
                out += "<w:gridSpan w:val=\"" + std::to_string(anchor.col_span) + "\"/>";
            }
            if (anchor.row_span > 1) {
                out += ar == r ? "<w:vMerge w:val=\"restart\"/>" : "<w:vMerge/>";
            }
            out += "</w:tcPr>";
            out += ar == r ? simple_paragraph_xml(anchor.text, bold_first_row && r == 0)
                           : "<w:p/>";
            out += "</w:tc>";
        }
        out += "</w:tr>";
    }
    out += "</w:tbl>";
    body_xml_ += out;
    return *this;
}

DocxBuilder& DocxBuilder::add_header_paragraph(const std::string& text) {
    header_paragraphs_.push_back(simple_paragraph_xml(text));
    return *this;
}

DocxBuilder& DocxBuilder::add_footer_paragraph(const std::string& text) {
    footer_paragraphs_.push_back(simple_paragraph_xml(text));
    return *this;
}

DocxBuilder& DocxBuilder::add_raw_body_xml(const std::string& xml) {
    body_xml_ += xml;
    return *this;
}

std::string DocxBuilder::build() const {
    std::vector<ZipEntry> entries;

    entries.push_back(ZipEntry{
        "[Content_Types].xml",
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
        "<Default Extension=\"rels\" "
        "ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
        "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
        "<Default Extension=\"png\" ContentType=\"image/png\"/>"
        "</Types>"});

    entries.push_back(ZipEntry{
        "_rels/.rels",
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
        "<Relationship Id=\"rId1\" "
        "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
        "officeDocument\" Target=\"word/document.xml\"/>"
        "</Relationships>"});

    std::string doc_rels =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
        "<Relationship Id=\"rIdStyles\" "
        "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/styles\" "
        "Target=\"styles.xml\"/>";
    if (!header_paragraphs_.empty()) {
        doc_rels += "<Relationship Id=\"rIdHdr\" "
                    "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
                    "header\" Target=\"header1.xml\"/>";
    }
    if (!footer_paragraphs_.empty()) {
        doc_rels += "<Relationship Id=\"rIdFtr\" "
                    "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
                    "footer\" Target=\"footer1.xml\"/>";
    }
    for (const MediaFile& media : media_) {
        doc_rels += "<Relationship Id=\"" + media.rid +
                    "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/"
                    "relationships/image\" Target=\"media/" +
                    media.file_name + "\"/>";
    }
    doc_rels += "</Relationships>";
    entries.push_back(ZipEntry{"word/_rels/document.xml.rels", doc_rels});

    std::string styles =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<w:styles xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\">"
        "<w:docDefaults><w:rPrDefault><w:rPr><w:sz w:val=\"" +
        std::to_string(static_cast<int>(default_size_pts_ * 2)) +
        "\"/></w:rPr></w:rPrDefault></w:docDefaults>" + styles_xml_ + "</w:styles>";
    entries.push_back(ZipEntry{"word/styles.xml", styles});

    std::string sect_pr;
    if (!header_paragraphs_.empty()) {
        sect_pr += "<w:headerReference w:type=\"default\" r:id=\"rIdHdr\"/>";
    }
    if (!footer_paragraphs_.empty()) {
        sect_pr += "<w:footerReference w:type=\"default\" r:id=\"rIdFtr\"/>";
    }
    std::string document =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\" "
        "xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\" "
        "xmlns:wp=\"http://schemas.openxmlformats.org/drawingml/2006/wordprocessingDrawing\" "
        "xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\" "
        "xmlns:pic=\"http://schemas.openxmlformats.org/drawingml/2006/picture\">"
        "<w:body>" +
        body_xml_ + (sect_pr.empty() ? "" : "<w:sectPr>" + sect_pr + "</w:sectPr>") +
        "</w:body></w:document>";
    entries.push_back(ZipEntry{"word/document.xml", document});

    if (!header_paragraphs_.empty()) {
        std::string hdr =
            "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
            "<w:hdr xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\">";
        for (const std::string& p : header_paragraphs_) hdr += p;
        hdr += "</w:hdr>";
        entries.push_back(ZipEntry{"word/header1.xml", hdr});
    }
    if (!footer_paragraphs_.empty()) {
        std::string ftr =
            "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
            "<w:ftr xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\">";
        for (const std::string& p : footer_paragraphs_) ftr += p;
        ftr += "</w:ftr>";
        entries.push_back(ZipEntry{"word/footer1.xml", ftr});
    }
    for (const MediaFile& media : media_) {
        entries.push_back(ZipEntry{"word/media/" + media.file_name, media.bytes});
    }
    return zip_store(entries);
}

} // namespace docpipe::test
