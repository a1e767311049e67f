#include "docpipe/jsonl.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

#include "docpipe/errors.hpp"

namespace docpipe {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* language_name(Language lang) {
    switch (lang) {
    case Language::Latin: return "latin";
    case Language::Cjk: return "cjk";
    case Language::Mixed: return "mixed";
    }
    return "latin";
}

std::optional<Language> language_from(const std::string& name) {
    if (name == "latin") return Language::Latin;
    if (name == "cjk") return Language::Cjk;
    if (name == "mixed") return Language::Mixed;
    return std::nullopt;
}

ordered_json parse_line(const std::string& line, const char* what) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaViolationError(std::string(what) + " line is not valid json: " + e.what());
    }
}

std::string get_string(const ordered_json& obj, const char* key, const char* what) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw SchemaViolationError(std::string(what) + "." + key);
    }
    return obj[key].get<std::string>();
}

std::optional<std::string> get_opt_string(const ordered_json& obj, const char* key,
                                          const char* what) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_string()) throw SchemaViolationError(std::string(what) + "." + key);
    return obj[key].get<std::string>();
}

int get_int(const ordered_json& obj, const char* key, const char* what) {
    if (!obj.contains(key) || !obj[key].is_number_integer()) {
        throw SchemaViolationError(std::string(what) + "." + key);
    }
    return obj[key].get<int>();
}

} // namespace

std::string element_to_jsonl_line(const Element& element) {
    ordered_json j;
    j["el_version"] = kElementsVersion;
    j["kind"] = to_string(element.kind);
    j["text"] = element.text;
    j["seq"] = element.seq;

    ordered_json md;
    md["source_name"] = element.metadata.source_name;
    if (!element.metadata.section_path.empty()) {
        md["section_path"] = element.metadata.section_path;
    }
    if (!element.metadata.languages.empty()) {
        ordered_json langs = ordered_json::array();
        for (Language lang : element.metadata.languages) langs.push_back(language_name(lang));
        md["languages"] = std::move(langs);
    }
    if (element.metadata.text_as_html) md["text_as_html"] = *element.metadata.text_as_html;
    if (element.metadata.image_ref) md["image_ref"] = *element.metadata.image_ref;
    if (element.metadata.caption) md["caption"] = *element.metadata.caption;
    if (element.metadata.derived_from) md["derived_from"] = *element.metadata.derived_from;
    if (element.metadata.error) md["error"] = *element.metadata.error;
    j["metadata"] = std::move(md);
    return j.dump();
}

Element element_from_jsonl_line(const std::string& line) {
    ordered_json j = parse_line(line, "element");
    if (!j.is_object()) throw SchemaViolationError("element line must be an object");
    if (j.contains("el_version") && j["el_version"].get<int>() != kElementsVersion) {
        throw SchemaViolationError("el_version");
    }
    Element el;
    auto kind = element_kind_from_string(get_string(j, "kind", "element"));
    if (!kind) throw SchemaViolationError("element.kind");
    el.kind = *kind;
    el.text = get_string(j, "text", "element");
    el.seq = get_int(j, "seq", "element");

    if (j.contains("metadata")) {
        const auto& md = j["metadata"];
        if (!md.is_object()) throw SchemaViolationError("element.metadata");
        if (md.contains("source_name")) {
            el.metadata.source_name = get_string(md, "source_name", "element.metadata");
        }
        if (md.contains("section_path")) {
            if (!md["section_path"].is_array()) {
                throw SchemaViolationError("element.metadata.section_path");
            }
            for (const auto& entry : md["section_path"]) {
                if (!entry.is_string()) {
                    throw SchemaViolationError("element.metadata.section_path[]");
                }
                el.metadata.section_path.push_back(entry.get<std::string>());
            }
        }
        if (md.contains("languages")) {
            if (!md["languages"].is_array()) {
                throw SchemaViolationError("element.metadata.languages");
            }
            for (const auto& entry : md["languages"]) {
                auto lang = entry.is_string() ? language_from(entry.get<std::string>())
                                              : std::nullopt;
                if (!lang) throw SchemaViolationError("element.metadata.languages[]");
                el.metadata.languages.insert(*lang);
            }
        }
        el.metadata.text_as_html = get_opt_string(md, "text_as_html", "element.metadata");
        el.metadata.image_ref = get_opt_string(md, "image_ref", "element.metadata");
        el.metadata.caption = get_opt_string(md, "caption", "element.metadata");
        el.metadata.derived_from = get_opt_string(md, "derived_from", "element.metadata");
        el.metadata.error = get_opt_string(md, "error", "element.metadata");
    }
    return el;
}

std::string chunk_to_jsonl_line(const Chunk& chunk) {
    ordered_json j;
    j["ck_version"] = kChunksVersion;
    j["id"] = chunk.id;
    j["text"] = chunk.text;
    j["kind"] = to_string(chunk.kind);
    if (chunk.section_title) j["section_title"] = *chunk.section_title;
    j["char_count"] = chunk.char_count;
    j["element_seqs"] = chunk.element_seqs;
    if (chunk.text_as_html) j["text_as_html"] = *chunk.text_as_html;
    if (chunk.continuation) j["continuation"] = true;
    j["source_name"] = chunk.source_name;
    return j.dump();
}

Chunk chunk_from_jsonl_line(const std::string& line) {
    ordered_json j = parse_line(line, "chunk");
    if (!j.is_object()) throw SchemaViolationError("chunk line must be an object");
    if (j.contains("ck_version") && j["ck_version"].get<int>() != kChunksVersion) {
        throw SchemaViolationError("ck_version");
    }
    Chunk chunk;
    chunk.id = get_string(j, "id", "chunk");
    chunk.text = get_string(j, "text", "chunk");
    auto kind = chunk_kind_from_string(get_string(j, "kind", "chunk"));
    if (!kind) throw SchemaViolationError("chunk.kind");
    chunk.kind = *kind;
    chunk.section_title = get_opt_string(j, "section_title", "chunk");
    chunk.char_count = get_int(j, "char_count", "chunk");
    if (!j.contains("element_seqs") || !j["element_seqs"].is_array()) {
        throw SchemaViolationError("chunk.element_seqs");
    }
    for (const auto& entry : j["element_seqs"]) {
        if (!entry.is_number_integer()) throw SchemaViolationError("chunk.element_seqs[]");
        chunk.element_seqs.push_back(entry.get<int>());
    }
    chunk.text_as_html = get_opt_string(j, "text_as_html", "chunk");
    if (j.contains("continuation")) {
        if (!j["continuation"].is_boolean()) throw SchemaViolationError("chunk.continuation");
        chunk.continuation = j["continuation"].get<bool>();
    }
    if (j.contains("source_name")) chunk.source_name = get_string(j, "source_name", "chunk");
    return chunk;
}

void write_elements_jsonl(std::ostream& out, const std::vector<Element>& elements) {
    for (const Element& el : elements) out << element_to_jsonl_line(el) << '\n';
}

std::vector<Element> read_elements_jsonl(std::istream& in) {
    std::vector<Element> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(element_from_jsonl_line(line));
    }
    return out;
}

void write_chunks_jsonl(std::ostream& out, const std::vector<Chunk>& chunks) {
    for (const Chunk& chunk : chunks) out << chunk_to_jsonl_line(chunk) << '\n';
}

std::vector<Chunk> read_chunks_jsonl(std::istream& in) {
    std::vector<Chunk> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(chunk_from_jsonl_line(line));
    }
    return out;
}

} // namespace docpipe
