#include "docpipe/partitioner.hpp"

#include <algorithm>
#include <map>

#include "docpipe/enricher.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/unicode.hpp"

namespace docpipe {

const char* to_string(ElementKind kind) {
    switch (kind) {
    case ElementKind::Title: return "Title";
    case ElementKind::NarrativeText: return "NarrativeText";
    case ElementKind::Table: return "Table";
    case ElementKind::Image: return "Image";
    case ElementKind::Header: return "Header";
    case ElementKind::Footer: return "Footer";
    case ElementKind::Uncategorized: return "Uncategorized";
    }
    return "Uncategorized";
}

std::optional<ElementKind> element_kind_from_string(std::string_view name) {
    if (name == "Title") return ElementKind::Title;
    if (name == "NarrativeText") return ElementKind::NarrativeText;
    if (name == "Table") return ElementKind::Table;
    if (name == "Image") return ElementKind::Image;
    if (name == "Header") return ElementKind::Header;
    if (name == "Footer") return ElementKind::Footer;
    if (name == "Uncategorized") return ElementKind::Uncategorized;
    return std::nullopt;
}

void PartitionRules::validate() const {
    if (size_ratio_threshold <= 1.0) {
        throw ConfigError("size_ratio_threshold must be > 1.0");
    }
    if (max_title_words <= 0 || max_title_chars_cjk <= 0) {
        throw ConfigError("title length thresholds must be positive");
    }
}

namespace {

struct ScriptCounts {
    std::size_t cjk = 0;
    std::size_t latin = 0;
    std::size_t non_ws = 0;
};

ScriptCounts count_scripts(const std::string& text) {
    ScriptCounts c;
    for (char32_t cp : uni::to_u32(text)) {
        if (uni::is_space(cp)) continue;
        ++c.non_ws;
        if (uni::is_cjk(cp)) ++c.cjk;
        else if (uni::is_latin_letter(cp)) ++c.latin;
    }
    return c;
}

std::size_t latin_word_count(const std::string& text) {
    std::size_t words = 0;
    bool in_word = false;
    for (char32_t cp : uni::to_u32(text)) {
        if (uni::is_space(cp)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words;
}

char32_t last_non_space(const std::string& text) {
    auto u = uni::to_u32(text);
    for (auto it = u.rbegin(); it != u.rend(); ++it) {
        if (!uni::is_space(*it)) return *it;
    }
    return 0;
}

bool style_matches(const std::optional<std::string>& style_name,
                   const std::vector<std::string>& patterns) {
    if (!style_name) return false;
    std::string lowered = *style_name;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const std::string& pat : patterns) {
        std::string p = pat;
        std::transform(p.begin(), p.end(), p.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!p.empty() && lowered.find(p) != std::string::npos) return true;
    }
    return false;
}

// Effective paragraph size: the run size covering the most characters.
std::optional<double> paragraph_size(const ParagraphBlock& para) {
    std::map<double, std::size_t> weight;
    for (const Run& r : para.runs) {
        if (!r.font_size_pts || r.image_anchor) continue;
        weight[*r.font_size_pts] += uni::length(r.text);
    }
    if (weight.empty()) return std::nullopt;
    auto best = weight.begin();
    for (auto it = weight.begin(); it != weight.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

// Modal font size over body paragraphs; ties resolve to the smaller size,
// since body text outnumbers anything else in a sane document.
std::optional<double> body_mode_size(const DocumentTree& tree) {
    std::map<double, std::size_t> freq;
    for (const Block& block : tree.blocks) {
        const auto* para = std::get_if<ParagraphBlock>(&block);
        if (!para || para->region != Region::Body) continue;
        if (auto size = paragraph_size(*para)) ++freq[*size];
    }
    if (freq.empty()) return std::nullopt;
    auto best = freq.begin();
    for (auto it = freq.begin(); it != freq.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

bool title_by_size(const ParagraphBlock& para, const std::string& text,
                   std::optional<double> body_size, const PartitionRules& rules) {
    if (!body_size) return false;
    auto size = paragraph_size(para);
    if (!size || *size < rules.size_ratio_threshold * *body_size) return false;
    if (uni::is_terminal_punct(last_non_space(text))) return false;
    if (is_mostly_cjk(text)) {
        ScriptCounts c = count_scripts(text);
        return c.non_ws <= static_cast<std::size_t>(rules.max_title_chars_cjk);
    }
    return latin_word_count(text) <= static_cast<std::size_t>(rules.max_title_words);
}

bool is_title(const ParagraphBlock& para, const std::string& text,
              std::optional<double> body_size, const PartitionRules& rules) {
    if (text.empty()) return false;
    if (para.outline_level) return true;
    if (style_matches(para.style_name, rules.heading_style_patterns)) return true;
    return title_by_size(para, text, body_size, rules);
}

class TitleStack {
public:
    void push(int level, const std::string& text) {
        while (!entries_.empty() && entries_.back().first >= level) entries_.pop_back();
        entries_.emplace_back(level, text);
    }
    std::vector<std::string> path() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& [level, text] : entries_) out.push_back(text);
        return out;
    }

private:
    std::vector<std::pair<int, std::string>> entries_;
};

} // namespace

std::set<Language> detect_languages(const std::string& text) {
    ScriptCounts c = count_scripts(text);
    std::set<Language> out;
    if (c.non_ws == 0) return out;
    double cjk_frac = static_cast<double>(c.cjk) / static_cast<double>(c.non_ws);
    double latin_frac = static_cast<double>(c.latin) / static_cast<double>(c.non_ws);
    if (cjk_frac > 0.1) out.insert(Language::Cjk);
    if (latin_frac > 0.1) out.insert(Language::Latin);
    if (out.size() == 2) out.insert(Language::Mixed);
    if (out.empty()) out.insert(Language::Latin); // digits/punctuation default
    return out;
}

bool is_mostly_cjk(const std::string& text) {
    ScriptCounts c = count_scripts(text);
    return c.non_ws > 0 && c.cjk * 2 > c.non_ws;
}

std::vector<Element> partition(const DocumentTree& tree, const PartitionRules& rules) {
    rules.validate();
    std::optional<double> body_size = body_mode_size(tree);

    std::vector<Element> out;
    TitleStack titles;
    int seq = 0;

    auto base_metadata = [&](const std::string& text) {
        ElementMetadata md;
        md.source_name = tree.source_name;
        md.languages = detect_languages(text);
        return md;
    };

    auto emit = [&](Element el) {
        el.seq = seq++;
        out.push_back(std::move(el));
    };

    for (const Block& block : tree.blocks) {
        if (const auto* table = std::get_if<TableBlock>(&block)) {
            Element el;
            el.text = render_table_text(*table);
            el.metadata = base_metadata(el.text);
            if (table->region == Region::Header) {
                el.kind = ElementKind::Header;
            } else if (table->region == Region::Footer) {
                el.kind = ElementKind::Footer;
            } else {
                el.kind = ElementKind::Table;
                el.metadata.section_path = titles.path();
                el.table = *table;
            }
            emit(std::move(el));
            continue;
        }

        const auto& para = std::get<ParagraphBlock>(block);
        if (para.region != Region::Body) {
            Element el;
            el.kind = para.region == Region::Header ? ElementKind::Header : ElementKind::Footer;
            el.text = para.text();
            el.metadata = base_metadata(el.text);
            emit(std::move(el));
            continue;
        }

        // Image runs split out of the paragraph, preserving order. Text
        // fragments inherit the paragraph's styling signals.
        std::vector<Run> pending;
        auto flush_text = [&] {
            std::string text;
            for (const Run& r : pending) text += r.text;
            bool had_runs = !pending.empty();
            pending.clear();
            if (!had_runs) return;

            Element el;
            el.text = text;
            el.metadata = base_metadata(text);
            if (text.empty()) {
                el.kind = ElementKind::Uncategorized;
                el.metadata.section_path = titles.path();
            } else if (is_title(para, text, body_size, rules)) {
                el.kind = ElementKind::Title;
                el.metadata.section_path = titles.path();
                titles.push(para.outline_level.value_or(0), text);
            } else {
                el.kind = ElementKind::NarrativeText;
                el.metadata.section_path = titles.path();
            }
            emit(std::move(el));
        };

        bool any = false;
        for (const Run& run : para.runs) {
            if (run.image_anchor) {
                // Evaluate the text gathered so far against the title rule
                // using the paragraph's own styling.
                if (!pending.empty()) flush_text();
                Element el;
                el.kind = ElementKind::Image;
                el.metadata = base_metadata("");
                el.metadata.image_ref = run.image_anchor;
                el.metadata.section_path = titles.path();
                emit(std::move(el));
                any = true;
            } else {
                pending.push_back(run);
                any = true;
            }
        }
        if (!pending.empty()) {
            flush_text();
        } else if (!any) {
            // Paragraph with no runs at all still maps to one element.
            Element el;
            el.kind = ElementKind::Uncategorized;
            el.metadata = base_metadata("");
            el.metadata.section_path = titles.path();
            emit(std::move(el));
        }
    }
    return out;
}

std::vector<Element> filter_elements(const std::vector<Element>& elements,
                                     const std::set<ElementKind>& drop) {
    std::vector<Element> out;
    out.reserve(elements.size());
    for (const Element& el : elements) {
        if (!drop.count(el.kind)) out.push_back(el);
    }
    return out;
}

} // namespace docpipe
