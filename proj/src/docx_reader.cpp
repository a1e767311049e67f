#include "docpipe/docx_reader.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>

#include "docpipe/errors.hpp"
#include "xml_dom.hpp"
#include "zip_archive.hpp"

namespace docpipe {

namespace {

// ---------------------------------------------------------------------------
// styles.xml

struct StyleDef {
    std::string id;
    std::string display_name;
    std::string based_on;
    std::optional<double> size_pts;
    std::optional<bool> bold;
    std::optional<int> outline_level;
};

struct StyleSheet {
    std::map<std::string, StyleDef> by_id;
    std::optional<double> default_size_pts;

    const StyleDef* find(const std::string& id) const {
        auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : &it->second;
    }

    // Walks the basedOn chain until a style defines the property. Chains in
    // real documents are short; the depth cap guards against cycles.
    template <typename Get>
    auto chain(const std::string& id, Get get) const -> decltype(get(StyleDef{})) {
        std::string cur = id;
        for (int depth = 0; depth < 16 && !cur.empty(); ++depth) {
            const StyleDef* def = find(cur);
            if (!def) break;
            if (auto v = get(*def)) return v;
            cur = def->based_on;
        }
        return {};
    }

    std::optional<double> chain_size(const std::string& id) const {
        return chain(id, [](const StyleDef& s) { return s.size_pts; });
    }
    std::optional<bool> chain_bold(const std::string& id) const {
        return chain(id, [](const StyleDef& s) { return s.bold; });
    }
    std::optional<int> chain_outline(const std::string& id) const {
        return chain(id, [](const StyleDef& s) { return s.outline_level; });
    }
};

std::optional<int> parse_int(const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> half_points_to_pts(const std::string& val) {
    // w:sz stores half-points.
    if (auto hp = parse_int(val)) return *hp / 2.0;
    return std::nullopt;
}

// OOXML on/off values: element present means on unless val says otherwise.
bool on_off(const xml::Node* node) {
    if (!node) return false;
    const std::string* val = node->attr("val");
    if (!val) return true;
    return !(*val == "false" || *val == "0" || *val == "none" || *val == "off");
}

std::optional<double> run_props_size(const xml::Node* rpr) {
    if (!rpr) return std::nullopt;
    if (const xml::Node* sz = rpr->child("sz")) {
        if (const std::string* val = sz->attr("val")) return half_points_to_pts(*val);
    }
    return std::nullopt;
}

std::optional<bool> run_props_bold(const xml::Node* rpr) {
    if (!rpr) return std::nullopt;
    if (const xml::Node* b = rpr->child("b")) return on_off(b);
    return std::nullopt;
}

StyleSheet parse_styles(const std::string& xml_text) {
    StyleSheet sheet;
    auto root = xml::parse(xml_text);
    if (const xml::Node* defaults = root->child("docDefaults")) {
        if (const xml::Node* rprd = defaults->child("rPrDefault")) {
            sheet.default_size_pts = run_props_size(rprd->child("rPr"));
        }
    }
    for (const xml::Node* style : root->children_named("style")) {
        const std::string* id = style->attr("styleId");
        if (!id) continue;
        StyleDef def;
        def.id = *id;
        if (const xml::Node* name = style->child("name")) {
            if (const std::string* val = name->attr("val")) def.display_name = *val;
        }
        if (const xml::Node* based = style->child("basedOn")) {
            if (const std::string* val = based->attr("val")) def.based_on = *val;
        }
        const xml::Node* rpr = style->child("rPr");
        def.size_pts = run_props_size(rpr);
        def.bold = run_props_bold(rpr);
        if (const xml::Node* ppr = style->child("pPr")) {
            if (const xml::Node* lvl = ppr->child("outlineLvl")) {
                if (const std::string* val = lvl->attr("val")) def.outline_level = parse_int(*val);
            }
        }
        sheet.by_id.emplace(def.id, std::move(def));
    }
    return sheet;
}

// ---------------------------------------------------------------------------
// relationships

struct Relationship {
    std::string type;
    std::string target;
};

using RelMap = std::map<std::string, Relationship>;

RelMap parse_rels(const std::string& xml_text) {
    RelMap out;
    auto root = xml::parse(xml_text);
    for (const xml::Node* rel : root->children_named("Relationship")) {
        const std::string* id = rel->attr("Id");
        const std::string* type = rel->attr("Type");
        const std::string* target = rel->attr("Target");
        if (!id || !type || !target) continue;
        if (const std::string* mode = rel->attr("TargetMode"); mode && *mode == "External") {
            continue;
        }
        out[*id] = Relationship{*type, *target};
    }
    return out;
}

std::string part_dir(const std::string& part) {
    auto pos = part.rfind('/');
    return pos == std::string::npos ? std::string() : part.substr(0, pos + 1);
}

std::string rels_path_for(const std::string& part) {
    auto pos = part.rfind('/');
    std::string dir = pos == std::string::npos ? std::string() : part.substr(0, pos + 1);
    std::string base = pos == std::string::npos ? part : part.substr(pos + 1);
    return dir + "_rels/" + base + ".rels";
}

// Resolves a relationship target against the directory of its source part,
// folding "../" segments.
std::string resolve_target(const std::string& base_dir, const std::string& target) {
    if (!target.empty() && target.front() == '/') return target.substr(1);
    std::vector<std::string> segs;
    auto push_path = [&segs](const std::string& path) {
        std::size_t start = 0;
        while (start <= path.size()) {
            auto end = path.find('/', start);
            std::string seg = path.substr(start, end == std::string::npos ? end : end - start);
            if (seg == "..") {
                if (!segs.empty()) segs.pop_back();
            } else if (!seg.empty() && seg != ".") {
                segs.push_back(seg);
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
    };
    push_path(base_dir);
    push_path(target);
    std::string out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (i) out += '/';
        out += segs[i];
    }
    return out;
}

bool type_ends_with(const std::string& type, std::string_view suffix) {
    return type.size() >= suffix.size() &&
           type.compare(type.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Raster formats only; everything else counts as a skipped vector drawing.
std::optional<std::string> raster_content_type(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "png") return "image/png";
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "bmp") return "image/bmp";
    if (ext == "tif" || ext == "tiff") return "image/tiff";
    if (ext == "webp") return "image/webp";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// part reader

struct PartContext {
    const RelMap* rels = nullptr;
    std::string base_dir;   // directory of the part, for target resolution
    std::string media_prefix; // "" for the body part, "<part>#" otherwise
    Region region = Region::Body;
};

class DocxReader {
public:
    DocxReader(std::string_view bytes, const std::string& source_name)
        : archive_(std::string(bytes)) {
        tree_.source_name = source_name;
    }

    DocumentTree run() {
        std::string main_part = locate_main_part();
        auto doc_xml = archive_.read(main_part);
        if (!doc_xml) throw MissingDocumentPartError(main_part);

        RelMap doc_rels;
        if (auto rels_xml = archive_.read(rels_path_for(main_part))) {
            doc_rels = parse_rels(*rels_xml);
        }
        if (auto styles_part = find_rel_target(doc_rels, main_part, "/styles")) {
            if (auto styles_xml = archive_.read(*styles_part)) {
                styles_ = parse_styles(*styles_xml);
            }
        } else if (auto styles_xml = archive_.read("word/styles.xml")) {
            styles_ = parse_styles(*styles_xml);
        }

        auto doc_root = xml::parse(*doc_xml);
        const xml::Node* body = doc_root->child("body");
        if (!body) throw MissingDocumentPartError(main_part + " (no body)");

        // Headers first, then body in document order, then footers.
        read_region_parts(doc_rels, main_part, "/header", Region::Header);

        PartContext body_ctx{&doc_rels, part_dir(main_part), "", Region::Body};
        read_block_children(*body, body_ctx);

        read_region_parts(doc_rels, main_part, "/footer", Region::Footer);
        return std::move(tree_);
    }

private:
    std::string locate_main_part() {
        if (auto pkg_rels = archive_.read("_rels/.rels")) {
            RelMap rels = parse_rels(*pkg_rels);
            for (const auto& [id, rel] : rels) {
                if (type_ends_with(rel.type, "/officeDocument")) {
                    return resolve_target("", rel.target);
                }
            }
        }
        if (archive_.contains("word/document.xml")) return "word/document.xml";
        throw MissingDocumentPartError("word/document.xml");
    }

    std::optional<std::string> find_rel_target(const RelMap& rels, const std::string& from_part,
                                               std::string_view type_suffix) {
        for (const auto& [id, rel] : rels) {
            if (type_ends_with(rel.type, type_suffix)) {
                return resolve_target(part_dir(from_part), rel.target);
            }
        }
        return std::nullopt;
    }

    void read_region_parts(const RelMap& doc_rels, const std::string& main_part,
                           std::string_view type_suffix, Region region) {
        std::vector<std::string> parts;
        for (const auto& [id, rel] : doc_rels) {
            if (type_ends_with(rel.type, type_suffix)) {
                parts.push_back(resolve_target(part_dir(main_part), rel.target));
            }
        }
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        for (const std::string& part : parts) {
            auto xml_text = archive_.read(part);
            if (!xml_text) continue;
            RelMap part_rels;
            if (auto rels_xml = archive_.read(rels_path_for(part))) {
                part_rels = parse_rels(*rels_xml);
            }
            PartContext ctx{&part_rels, part_dir(part), part + "#", region};
            auto root = xml::parse(*xml_text);
            read_block_children(*root, ctx);
        }
    }

    void read_block_children(const xml::Node& parent, const PartContext& ctx) {
        for (const auto& child : parent.children) {
            auto local = child->local_name();
            if (local == "p") {
                tree_.blocks.emplace_back(read_paragraph(*child, ctx));
            } else if (local == "tbl") {
                tree_.blocks.emplace_back(read_table(*child, ctx));
            } else if (local == "sdt") {
                if (const xml::Node* content = child->child("sdtContent")) {
                    read_block_children(*content, ctx);
                }
            }
            // sectPr and friends carry no content.
        }
    }

    ParagraphBlock read_paragraph(const xml::Node& p, const PartContext& ctx) {
        ParagraphBlock block;
        block.region = ctx.region;

        std::string style_id;
        if (const xml::Node* ppr = p.child("pPr")) {
            if (const xml::Node* pstyle = ppr->child("pStyle")) {
                if (const std::string* val = pstyle->attr("val")) style_id = *val;
            }
            if (const xml::Node* lvl = ppr->child("outlineLvl")) {
                if (const std::string* val = lvl->attr("val")) block.outline_level = parse_int(*val);
            }
            if (const xml::Node* numpr = ppr->child("numPr")) {
                // Referencing a numbering definition marks the paragraph as a
                // list item; the rendered marker text is never synthesized.
                if (numpr->child("numId")) block.list_marker = true;
            }
        }
        if (!style_id.empty()) {
            const StyleDef* def = styles_.find(style_id);
            block.style_name = (def && !def->display_name.empty()) ? def->display_name : style_id;
            if (!block.outline_level) block.outline_level = styles_.chain_outline(style_id);
        }

        read_run_children(p, ctx, style_id, block.runs);
        return block;
    }

    // Collects runs from paragraph-level content, recursing through
    // hyperlinks, content controls and accepted insertions. Deleted runs
    // (w:del) are skipped: the document is taken as displayed.
    void read_run_children(const xml::Node& parent, const PartContext& ctx,
                           const std::string& para_style_id, std::vector<Run>& out) {
        for (const auto& child : parent.children) {
            auto local = child->local_name();
            if (local == "r") {
                read_run(*child, ctx, para_style_id, out);
            } else if (local == "hyperlink" || local == "smartTag" || local == "ins" ||
                       local == "bdo" || local == "dir") {
                read_run_children(*child, ctx, para_style_id, out);
            } else if (local == "sdt") {
                if (const xml::Node* content = child->child("sdtContent")) {
                    read_run_children(*content, ctx, para_style_id, out);
                }
            }
        }
    }

    void read_run(const xml::Node& r, const PartContext& ctx, const std::string& para_style_id,
                  std::vector<Run>& out) {
        std::string run_style_id;
        std::optional<double> direct_size;
        std::optional<bool> direct_bold;
        if (const xml::Node* rpr = r.child("rPr")) {
            if (const xml::Node* rstyle = rpr->child("rStyle")) {
                if (const std::string* val = rstyle->attr("val")) run_style_id = *val;
            }
            direct_size = run_props_size(rpr);
            direct_bold = run_props_bold(rpr);
        }

        // Effective formatting: run direct -> run style chain -> paragraph
        // style chain -> document default. Size stays unknown when the whole
        // chain is silent.
        std::optional<double> size = direct_size;
        if (!size && !run_style_id.empty()) size = styles_.chain_size(run_style_id);
        if (!size && !para_style_id.empty()) size = styles_.chain_size(para_style_id);
        if (!size) size = styles_.default_size_pts;

        std::optional<bool> bold = direct_bold;
        if (!bold && !run_style_id.empty()) bold = styles_.chain_bold(run_style_id);
        if (!bold && !para_style_id.empty()) bold = styles_.chain_bold(para_style_id);

        std::string pending;
        auto flush_text = [&] {
            if (pending.empty()) return;
            Run run;
            run.text = std::move(pending);
            pending.clear();
            run.font_size_pts = size;
            run.bold = bold.value_or(false);
            out.push_back(std::move(run));
        };

        for (const auto& child : r.children) {
            auto local = child->local_name();
            if (local == "t") {
                pending += child->text;
            } else if (local == "tab") {
                pending += '\t';
            } else if (local == "br" || local == "cr") {
                pending += '\n';
            } else if (local == "noBreakHyphen") {
                pending += '-';
            } else if (local == "drawing") {
                flush_text();
                if (auto media_id = capture_image(*child, ctx)) {
                    Run run;
                    run.image_anchor = *media_id;
                    run.font_size_pts = size;
                    run.bold = bold.value_or(false);
                    out.push_back(std::move(run));
                }
            } else if (local == "pict" || local == "object") {
                // VML shapes and embedded objects have no raster payload.
                ++tree_.skips.vector_drawings;
            }
        }
        flush_text();
    }

    // Inline and anchored raster images are captured into the media map;
    // drawings without a bitmap reference are counted and dropped.
    std::optional<std::string> capture_image(const xml::Node& drawing, const PartContext& ctx) {
        const xml::Node* blip = find_descendant(drawing, "blip");
        const std::string* rid = blip ? blip->attr("embed") : nullptr;
        if (!rid) {
            ++tree_.skips.vector_drawings;
            return std::nullopt;
        }
        if (!ctx.rels) {
            ++tree_.skips.vector_drawings;
            return std::nullopt;
        }
        auto it = ctx.rels->find(*rid);
        if (it == ctx.rels->end()) {
            ++tree_.skips.vector_drawings;
            return std::nullopt;
        }
        std::string media_part = resolve_target(ctx.base_dir, it->second.target);
        auto ctype = raster_content_type(media_part);
        if (!ctype) {
            ++tree_.skips.vector_drawings;
            return std::nullopt;
        }
        auto bytes = archive_.read(media_part);
        if (!bytes) {
            ++tree_.skips.vector_drawings;
            return std::nullopt;
        }
        std::string media_id = ctx.media_prefix + *rid;
        MediaItem item;
        item.bytes.assign(bytes->begin(), bytes->end());
        item.content_type = *ctype;
        tree_.media[media_id] = std::move(item);
        return media_id;
    }

    static const xml::Node* find_descendant(const xml::Node& node, std::string_view local) {
        for (const auto& child : node.children) {
            if (child->local_name() == local) return child.get();
            if (const xml::Node* found = find_descendant(*child, local)) return found;
        }
        return nullptr;
    }

    // Effective bold of every text run under a cell, resolving run and
    // paragraph style chains; used for the header-row fallback.
    void walk_cell_runs(const xml::Node& node, const std::string& outer_style_id, bool& any_text,
                        bool& all_bold) {
        std::string para_style_id = outer_style_id;
        if (node.local_name() == "p") {
            if (const xml::Node* ppr = node.child("pPr")) {
                if (const xml::Node* pstyle = ppr->child("pStyle")) {
                    if (const std::string* val = pstyle->attr("val")) para_style_id = *val;
                }
            }
        }
        for (const auto& child : node.children) {
            auto local = child->local_name();
            if (local == "del") continue;
            if (local == "r") {
                std::string text;
                for (const auto& part : child->children) {
                    if (part->local_name() == "t") text += part->text;
                }
                if (text.empty()) continue;
                any_text = true;
                std::optional<bool> bold;
                std::string run_style_id;
                if (const xml::Node* rpr = child->child("rPr")) {
                    if (const xml::Node* rstyle = rpr->child("rStyle")) {
                        if (const std::string* val = rstyle->attr("val")) run_style_id = *val;
                    }
                    bold = run_props_bold(rpr);
                }
                if (!bold && !run_style_id.empty()) bold = styles_.chain_bold(run_style_id);
                if (!bold && !para_style_id.empty()) bold = styles_.chain_bold(para_style_id);
                if (!bold.value_or(false)) all_bold = false;
            } else {
                walk_cell_runs(*child, para_style_id, any_text, all_bold);
            }
        }
    }

    TableBlock read_table(const xml::Node& tbl, const PartContext& ctx) {
        TableBlock table;
        table.region = ctx.region;
        if (const xml::Node* tblpr = tbl.child("tblPr")) {
            if (const xml::Node* caption = tblpr->child("tblCaption")) {
                if (const std::string* val = caption->attr("val")) table.caption_hint = *val;
            }
        }

        // Column -> anchor position for open vertical merges.
        struct Anchor {
            std::size_t row;
            std::size_t idx;
        };
        std::map<std::size_t, Anchor> open_vmerge;
        bool header_prefix = true;
        bool any_flagged = false;
        bool first_row_all_bold = true;
        bool first_row_has_text = false;

        for (const xml::Node* tr : tbl.children_named("tr")) {
            bool row_flagged = false;
            if (const xml::Node* trpr = tr->child("trPr")) {
                row_flagged = on_off(trpr->child("tblHeader"));
            }
            any_flagged = any_flagged || row_flagged;
            // Header rows must form a leading prefix.
            bool is_header_row = row_flagged && header_prefix;
            if (!is_header_row) header_prefix = false;

            std::vector<Cell> row;
            std::size_t col = 0;
            for (const xml::Node* tc : tr->children_named("tc")) {
                int col_span = 1;
                enum class Merge { None, Restart, Continue } merge = Merge::None;
                if (const xml::Node* tcpr = tc->child("tcPr")) {
                    if (const xml::Node* span = tcpr->child("gridSpan")) {
                        if (const std::string* val = span->attr("val")) {
                            col_span = std::max(1, parse_int(*val).value_or(1));
                        }
                    }
                    if (const xml::Node* vmerge = tcpr->child("vMerge")) {
                        const std::string* val = vmerge->attr("val");
                        merge = (val && *val == "restart") ? Merge::Restart : Merge::Continue;
                    }
                }

                if (merge == Merge::Continue) {
                    auto it = open_vmerge.find(col);
                    if (it != open_vmerge.end()) {
                        auto [arow, aidx] = it->second;
                        ++table.grid[arow][aidx].row_span;
                        col += static_cast<std::size_t>(col_span);
                        continue;
                    }
                    // No anchor above: degrade to a normal cell.
                }

                Cell cell;
                cell.col_span = col_span;
                cell.is_header = is_header_row;
                cell.text = cell_text(*tc);
                if (table.grid.empty()) {
                    bool any_text = false;
                    bool all_bold = true;
                    walk_cell_runs(*tc, "", any_text, all_bold);
                    first_row_has_text = first_row_has_text || any_text;
                    if (!any_text || !all_bold) first_row_all_bold = false;
                }
                std::size_t idx = row.size();
                row.push_back(std::move(cell));
                if (merge == Merge::Restart) {
                    open_vmerge[col] = Anchor{table.grid.size(), idx};
                } else {
                    open_vmerge.erase(col);
                }
                col += static_cast<std::size_t>(col_span);
            }
            table.grid.push_back(std::move(row));
        }
        // No explicit header flags anywhere: an all-bold first row is taken
        // as the header row.
        if (!any_flagged && !table.grid.empty() && first_row_has_text && first_row_all_bold) {
            for (Cell& cell : table.grid[0]) cell.is_header = true;
        }
        return table;
    }

    // Cell text: direct paragraphs joined with a single space. Nested tables
    // are out of scope for cell content.
    static std::string cell_text(const xml::Node& tc) {
        std::string out;
        for (const auto& child : tc.children) {
            if (child->local_name() != "p") continue;
            std::string para = paragraph_plain_text(*child);
            if (para.empty()) continue;
            if (!out.empty()) out += ' ';
            out += para;
        }
        return out;
    }

    static std::string paragraph_plain_text(const xml::Node& p) {
        std::string out;
        collect_text(p, out);
        return out;
    }

    static void collect_text(const xml::Node& node, std::string& out) {
        auto local = node.local_name();
        if (local == "del" || local == "pPr" || local == "rPr") return;
        if (local == "t") {
            out += node.text;
            return;
        }
        if (local == "tab") {
            out += '\t';
            return;
        }
        if (local == "br" || local == "cr") {
            out += '\n';
            return;
        }
        for (const auto& child : node.children) collect_text(*child, out);
    }

    zip::Archive archive_;
    StyleSheet styles_;
    DocumentTree tree_;
};

} // namespace

DocumentTree open_docx(std::string_view bytes, const std::string& source_name) {
    DocxReader reader(bytes, source_name);
    return reader.run();
}

} // namespace docpipe
