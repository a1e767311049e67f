#include "docpipe/plain_document.hpp"

#include <json.hpp>

#include "base64.hpp"
#include "docpipe/errors.hpp"

namespace docpipe {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void violation(const std::string& field) {
    throw SchemaViolationError(field);
}

void require_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) violation(where + "." + it.key() + " (unknown key)");
    }
}

Region parse_region(const ordered_json& obj, const std::string& where) {
    if (!obj.contains("region")) return Region::Body;
    const auto& r = obj["region"];
    if (!r.is_string()) violation(where + ".region");
    std::string s = r.get<std::string>();
    if (s == "body") return Region::Body;
    if (s == "header") return Region::Header;
    if (s == "footer") return Region::Footer;
    violation(where + ".region");
}

const char* region_name(Region r) {
    switch (r) {
    case Region::Header: return "header";
    case Region::Footer: return "footer";
    default: return "body";
    }
}

Run parse_run(const ordered_json& obj, const std::string& where) {
    if (!obj.is_object()) violation(where);
    require_keys(obj, {"text", "image", "font_size_pts", "bold"}, where);
    Run run;
    bool has_text = obj.contains("text");
    bool has_image = obj.contains("image");
    if (has_text == has_image) violation(where + " (exactly one of text/image required)");
    if (has_text) {
        if (!obj["text"].is_string()) violation(where + ".text");
        run.text = obj["text"].get<std::string>();
    } else {
        if (!obj["image"].is_string()) violation(where + ".image");
        run.image_anchor = obj["image"].get<std::string>();
    }
    if (obj.contains("font_size_pts")) {
        if (!obj["font_size_pts"].is_number()) violation(where + ".font_size_pts");
        run.font_size_pts = obj["font_size_pts"].get<double>();
    }
    if (obj.contains("bold")) {
        if (!obj["bold"].is_boolean()) violation(where + ".bold");
        run.bold = obj["bold"].get<bool>();
    }
    return run;
}

ParagraphBlock parse_para(const ordered_json& obj, const std::string& where) {
    if (!obj.is_object()) violation(where);
    require_keys(obj, {"runs", "text", "style_name", "outline_level", "list_marker", "region"},
                 where);
    ParagraphBlock block;
    block.region = parse_region(obj, where);
    if (obj.contains("runs") && obj.contains("text")) {
        violation(where + " (runs and text are mutually exclusive)");
    }
    if (obj.contains("runs")) {
        if (!obj["runs"].is_array()) violation(where + ".runs");
        std::size_t i = 0;
        for (const auto& r : obj["runs"]) {
            block.runs.push_back(parse_run(r, where + ".runs[" + std::to_string(i) + "]"));
            ++i;
        }
    } else if (obj.contains("text")) {
        // Shorthand: a single unstyled text run.
        if (!obj["text"].is_string()) violation(where + ".text");
        Run run;
        run.text = obj["text"].get<std::string>();
        if (!run.text.empty()) block.runs.push_back(std::move(run));
    }
    if (obj.contains("style_name")) {
        if (!obj["style_name"].is_string()) violation(where + ".style_name");
        block.style_name = obj["style_name"].get<std::string>();
    }
    if (obj.contains("outline_level")) {
        if (!obj["outline_level"].is_number_integer()) violation(where + ".outline_level");
        int lvl = obj["outline_level"].get<int>();
        if (lvl < 0) violation(where + ".outline_level (must be >= 0)");
        block.outline_level = lvl;
    }
    if (obj.contains("list_marker")) {
        if (!obj["list_marker"].is_boolean()) violation(where + ".list_marker");
        block.list_marker = obj["list_marker"].get<bool>();
    }
    return block;
}

TableBlock parse_table(const ordered_json& obj, const std::string& where) {
    if (!obj.is_object()) violation(where);
    require_keys(obj, {"rows", "caption_hint", "region"}, where);
    TableBlock table;
    table.region = parse_region(obj, where);
    if (obj.contains("caption_hint")) {
        if (!obj["caption_hint"].is_string()) violation(where + ".caption_hint");
        table.caption_hint = obj["caption_hint"].get<std::string>();
    }
    if (!obj.contains("rows") || !obj["rows"].is_array()) violation(where + ".rows");
    std::size_t r = 0;
    for (const auto& row_json : obj["rows"]) {
        if (!row_json.is_array()) violation(where + ".rows[" + std::to_string(r) + "]");
        std::vector<Cell> row;
        std::size_t c = 0;
        for (const auto& cell_json : row_json) {
            std::string cwhere =
                where + ".rows[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (!cell_json.is_object()) violation(cwhere);
            require_keys(cell_json, {"text", "row_span", "col_span", "header"}, cwhere);
            Cell cell;
            if (cell_json.contains("text")) {
                if (!cell_json["text"].is_string()) violation(cwhere + ".text");
                cell.text = cell_json["text"].get<std::string>();
            }
            if (cell_json.contains("row_span")) {
                if (!cell_json["row_span"].is_number_integer() ||
                    cell_json["row_span"].get<int>() < 1) {
                    violation(cwhere + ".row_span");
                }
                cell.row_span = cell_json["row_span"].get<int>();
            }
            if (cell_json.contains("col_span")) {
                if (!cell_json["col_span"].is_number_integer() ||
                    cell_json["col_span"].get<int>() < 1) {
                    violation(cwhere + ".col_span");
                }
                cell.col_span = cell_json["col_span"].get<int>();
            }
            if (cell_json.contains("header")) {
                if (!cell_json["header"].is_boolean()) violation(cwhere + ".header");
                cell.is_header = cell_json["header"].get<bool>();
            }
            row.push_back(std::move(cell));
            ++c;
        }
        table.grid.push_back(std::move(row));
        ++r;
    }
    return table;
}

} // namespace

DocumentTree open_plain_document(std::string_view json_text,
                                 const std::string& fallback_source_name) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        violation(std::string("(invalid json: ") + e.what() + ")");
    }
    if (!doc.is_object()) violation("(top level must be an object)");
    require_keys(doc, {"pd_version", "source_name", "blocks", "media"}, "$");

    if (doc.contains("pd_version")) {
        if (!doc["pd_version"].is_number_integer() ||
            doc["pd_version"].get<int>() != kPlainDocumentVersion) {
            violation("pd_version");
        }
    }

    DocumentTree tree;
    tree.source_name = fallback_source_name;
    if (doc.contains("source_name")) {
        if (!doc["source_name"].is_string()) violation("source_name");
        tree.source_name = doc["source_name"].get<std::string>();
    }

    if (!doc.contains("blocks") || !doc["blocks"].is_array()) violation("blocks");
    std::size_t i = 0;
    for (const auto& entry : doc["blocks"]) {
        std::string where = "blocks[" + std::to_string(i) + "]";
        if (!entry.is_object() || entry.size() != 1) {
            violation(where + " (expected single-key object: para or table)");
        }
        if (entry.contains("para")) {
            tree.blocks.emplace_back(parse_para(entry["para"], where + ".para"));
        } else if (entry.contains("table")) {
            tree.blocks.emplace_back(parse_table(entry["table"], where + ".table"));
        } else {
            violation(where + "." + entry.begin().key());
        }
        ++i;
    }

    if (doc.contains("media")) {
        if (!doc["media"].is_object()) violation("media");
        for (auto it = doc["media"].begin(); it != doc["media"].end(); ++it) {
            std::string where = "media." + it.key();
            const auto& m = it.value();
            if (!m.is_object()) violation(where);
            require_keys(m, {"content_type", "base64"}, where);
            MediaItem item;
            if (!m.contains("content_type") || !m["content_type"].is_string()) {
                violation(where + ".content_type");
            }
            item.content_type = m["content_type"].get<std::string>();
            if (!m.contains("base64") || !m["base64"].is_string()) violation(where + ".base64");
            auto bytes = b64::decode(m["base64"].get<std::string>());
            if (!bytes) violation(where + ".base64 (invalid encoding)");
            item.bytes = std::move(*bytes);
            tree.media.emplace(it.key(), std::move(item));
        }
    }

    // Image anchors must resolve into the media map.
    for (std::size_t b = 0; b < tree.blocks.size(); ++b) {
        if (const auto* para = std::get_if<ParagraphBlock>(&tree.blocks[b])) {
            for (std::size_t rn = 0; rn < para->runs.size(); ++rn) {
                const Run& run = para->runs[rn];
                if (run.image_anchor && !tree.media.count(*run.image_anchor)) {
                    violation("blocks[" + std::to_string(b) + "].para.runs[" +
                              std::to_string(rn) + "].image (unresolved media id)");
                }
            }
        }
    }
    return tree;
}

std::string to_plain_document(const DocumentTree& tree) {
    ordered_json doc;
    doc["pd_version"] = kPlainDocumentVersion;
    doc["source_name"] = tree.source_name;
    doc["blocks"] = ordered_json::array();
    for (const Block& block : tree.blocks) {
        ordered_json entry;
        if (const auto* para = std::get_if<ParagraphBlock>(&block)) {
            ordered_json p;
            p["runs"] = ordered_json::array();
            for (const Run& run : para->runs) {
                ordered_json r;
                if (run.image_anchor) {
                    r["image"] = *run.image_anchor;
                } else {
                    r["text"] = run.text;
                }
                if (run.font_size_pts) r["font_size_pts"] = *run.font_size_pts;
                if (run.bold) r["bold"] = true;
                p["runs"].push_back(std::move(r));
            }
            if (para->style_name) p["style_name"] = *para->style_name;
            if (para->outline_level) p["outline_level"] = *para->outline_level;
            if (para->list_marker) p["list_marker"] = true;
            if (para->region != Region::Body) p["region"] = region_name(para->region);
            entry["para"] = std::move(p);
        } else {
            const auto& table = std::get<TableBlock>(block);
            ordered_json t;
            t["rows"] = ordered_json::array();
            for (const auto& row : table.grid) {
                ordered_json row_json = ordered_json::array();
                for (const Cell& cell : row) {
                    ordered_json c;
                    c["text"] = cell.text;
                    if (cell.row_span != 1) c["row_span"] = cell.row_span;
                    if (cell.col_span != 1) c["col_span"] = cell.col_span;
                    if (cell.is_header) c["header"] = true;
                    row_json.push_back(std::move(c));
                }
                t["rows"].push_back(std::move(row_json));
            }
            if (table.caption_hint) t["caption_hint"] = *table.caption_hint;
            if (table.region != Region::Body) t["region"] = region_name(table.region);
            entry["table"] = std::move(t);
        }
        doc["blocks"].push_back(std::move(entry));
    }
    if (!tree.media.empty()) {
        ordered_json media;
        for (const auto& [id, item] : tree.media) {
            ordered_json m;
            m["content_type"] = item.content_type;
            m["base64"] = b64::encode(item.bytes);
            media[id] = std::move(m);
        }
        doc["media"] = std::move(media);
    }
    return doc.dump();
}

} // namespace docpipe
