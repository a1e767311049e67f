#include "docpipe/enricher.hpp"

#include <algorithm>
#include <deque>
#include <future>

#include "docpipe/digest.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/unicode.hpp"

namespace docpipe {

namespace {

std::string escape_html(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

bool row_is_flagged_header(const std::vector<Cell>& row) {
    if (row.empty()) return false;
    return std::all_of(row.begin(), row.end(), [](const Cell& c) { return c.is_header; });
}

// Cells whose text is dominated by digits and numeric punctuation.
bool cell_is_numeric(const std::string& text) {
    std::size_t digits = 0;
    std::size_t numeric_like = 0;
    std::size_t total = 0;
    for (char32_t cp : uni::to_u32(text)) {
        if (uni::is_space(cp)) continue;
        ++total;
        if (uni::is_ascii_digit(cp)) {
            ++digits;
            ++numeric_like;
        } else if (cp == U'.' || cp == U',' || cp == U'%' || cp == U'+' || cp == U'-' ||
                   cp == 0x00B1 /* ± */ || cp == U'(' || cp == U')') {
            ++numeric_like;
        }
    }
    return total > 0 && digits > 0 && numeric_like * 2 > total;
}

std::size_t header_row_count(const TableBlock& table) {
    std::size_t flagged = 0;
    while (flagged < table.grid.size() && row_is_flagged_header(table.grid[flagged])) ++flagged;
    if (flagged > 0) return flagged;
    // No explicit flags: treat row 1 as the header when the table has at
    // least two rows and row 1 does not look like data.
    if (table.grid.size() >= 2 && !table.grid[0].empty()) {
        std::size_t numeric = 0;
        for (const Cell& c : table.grid[0]) {
            if (cell_is_numeric(c.text)) ++numeric;
        }
        if (numeric * 2 <= table.grid[0].size()) return 1;
    }
    return 0;
}

void append_row_html(std::string& out, const std::vector<Cell>& row, const char* tag) {
    out += "<tr>";
    for (const Cell& cell : row) {
        out += "<";
        out += tag;
        if (cell.col_span > 1) out += " colspan=\"" + std::to_string(cell.col_span) + "\"";
        if (cell.row_span > 1) out += " rowspan=\"" + std::to_string(cell.row_span) + "\"";
        out += ">";
        out += escape_html(cell.text);
        out += "</";
        out += tag;
        out += ">";
    }
    out += "</tr>";
}

} // namespace

std::string render_table_text(const TableBlock& table) {
    std::string out;
    for (std::size_t r = 0; r < table.grid.size(); ++r) {
        if (r) out += '\n';
        for (std::size_t c = 0; c < table.grid[r].size(); ++c) {
            if (c) out += ' ';
            out += table.grid[r][c].text;
        }
    }
    return out;
}

std::string render_table_html(const TableBlock& table, const std::optional<std::string>& caption) {
    std::size_t header_rows = header_row_count(table);

    std::string html = "<table>";
    if (header_rows > 0) {
        html += "<thead>";
        for (std::size_t r = 0; r < header_rows; ++r) {
            append_row_html(html, table.grid[r], "th");
        }
        html += "</thead>";
    }
    html += "<tbody>";
    for (std::size_t r = header_rows; r < table.grid.size(); ++r) {
        append_row_html(html, table.grid[r], "td");
    }
    html += "</tbody></table>";

    if (caption) {
        return "<pre>" + escape_html(*caption) + "\n" + html + "</pre>";
    }
    return html;
}

void CaptionRule::validate() const {
    if (search_window < 1) throw ConfigError("caption search_window must be >= 1");
}

bool matches_caption_pattern(const std::string& text, const std::vector<std::string>& patterns) {
    std::u32string u = uni::to_u32(text);
    std::size_t start = 0;
    while (start < u.size() && uni::is_space(u[start])) ++start;

    auto lower = [](char32_t cp) {
        return (cp >= U'A' && cp <= U'Z') ? cp + (U'a' - U'A') : cp;
    };

    for (const std::string& pat : patterns) {
        std::u32string p = uni::to_u32(pat);
        if (p.empty() || start + p.size() > u.size()) continue;
        bool match = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (lower(u[start + i]) != lower(p[i])) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        // The marker must introduce a number: "Table 1", "表1", "图 3-1".
        std::size_t pos = start + p.size();
        while (pos < u.size() && uni::is_space(u[pos])) ++pos;
        if (pos < u.size() &&
            (uni::is_ascii_digit(u[pos]) || (u[pos] >= 0xFF10 && u[pos] <= 0xFF19))) {
            return true;
        }
    }
    return false;
}

void associate_captions(std::vector<Element>& elements, const CaptionRule& rule) {
    rule.validate();
    auto find_caption = [&](std::size_t idx,
                            const std::vector<std::string>& patterns) -> std::optional<std::string> {
        // Nearest match wins; the preceding side wins a distance tie.
        for (int dist = 1; dist <= rule.search_window; ++dist) {
            if (idx >= static_cast<std::size_t>(dist)) {
                const Element& cand = elements[idx - static_cast<std::size_t>(dist)];
                if (cand.kind == ElementKind::NarrativeText &&
                    matches_caption_pattern(cand.text, patterns)) {
                    return cand.text;
                }
            }
            if (idx + static_cast<std::size_t>(dist) < elements.size()) {
                const Element& cand = elements[idx + static_cast<std::size_t>(dist)];
                if (cand.kind == ElementKind::NarrativeText &&
                    matches_caption_pattern(cand.text, patterns)) {
                    return cand.text;
                }
            }
        }
        return std::nullopt;
    };

    for (std::size_t i = 0; i < elements.size(); ++i) {
        Element& el = elements[i];
        if (el.kind == ElementKind::Table) {
            auto caption = find_caption(i, rule.table_patterns);
            if (!caption && el.table && el.table->caption_hint) {
                caption = el.table->caption_hint;
            }
            el.metadata.caption = caption;
            if (el.table) {
                el.metadata.text_as_html = render_table_html(*el.table, caption);
            }
        } else if (el.kind == ElementKind::Image) {
            el.metadata.caption = find_caption(i, rule.figure_patterns);
        }
    }
}

std::string MockVisionClient::describe(std::span<const std::uint8_t> image_bytes,
                                       const std::string& /*content_type*/,
                                       const std::string& prompt) {
    {
        std::lock_guard lock(mutex_);
        prompts_.push_back(prompt);
    }
    std::string_view view(reinterpret_cast<const char*>(image_bytes.data()), image_bytes.size());
    return "IMG-DESC:" + sha256_hex(view, 16);
}

std::vector<std::string> MockVisionClient::prompts_seen() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

std::string build_vision_prompt(const std::optional<std::string>& caption) {
    std::string prompt =
        "Describe the content of this image for a retrieval index. State the key facts, "
        "data and relationships it shows as plain text.";
    if (caption && !caption->empty()) {
        prompt += " The image caption is: \"" + *caption + "\".";
    }
    return prompt;
}

void describe_images(std::vector<Element>& elements,
                     const std::map<std::string, MediaItem>& media, VisionClient& client,
                     int max_in_flight) {
    if (max_in_flight < 1) max_in_flight = 1;

    struct Job {
        std::size_t index;
        std::future<std::string> result;
    };
    std::deque<Job> window;

    // Substitutions commit in document order even though up to max_in_flight
    // client calls run concurrently.
    auto commit_front = [&] {
        Job job = std::move(window.front());
        window.pop_front();
        Element& el = elements[job.index];
        try {
            std::string description = job.result.get();
            el.kind = ElementKind::NarrativeText;
            el.text = std::move(description);
            el.metadata.derived_from = "image";
            el.metadata.languages = detect_languages(el.text);
        } catch (const VisionUnavailableError& e) {
            el.metadata.error = e.what();
        }
    };

    for (std::size_t i = 0; i < elements.size(); ++i) {
        Element& el = elements[i];
        if (el.kind != ElementKind::Image) continue;
        if (!el.metadata.image_ref || !media.count(*el.metadata.image_ref)) {
            el.metadata.error = "unresolved image reference";
            continue;
        }
        const MediaItem& item = media.at(*el.metadata.image_ref);
        std::string prompt = build_vision_prompt(el.metadata.caption);
        if (window.size() >= static_cast<std::size_t>(max_in_flight)) commit_front();
        window.push_back(Job{
            i, std::async(std::launch::async, [&client, &item, prompt = std::move(prompt)] {
                return client.describe(
                    std::span<const std::uint8_t>(item.bytes.data(), item.bytes.size()),
                    item.content_type, prompt);
            })});
    }
    while (!window.empty()) commit_front();
}

} // namespace docpipe
