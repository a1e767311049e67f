#include "docpipe/chunker.hpp"

#include <algorithm>

#include "docpipe/digest.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/unicode.hpp"

namespace docpipe {

void ChunkingConfig::validate() const {
    if (max_characters <= 0) throw ConfigError("max_characters must be > 0");
    if (new_after_n_chars > max_characters) {
        throw ConfigError("new_after_n_chars must not exceed max_characters");
    }
    if (combine_text_under_n_chars < 0 || combine_text_under_n_chars > new_after_n_chars) {
        throw ConfigError("combine_text_under_n_chars must be in [0, new_after_n_chars]");
    }
}

const char* to_string(ChunkKind kind) {
    switch (kind) {
    case ChunkKind::Composite: return "composite";
    case ChunkKind::Table: return "table";
    case ChunkKind::ImageDescription: return "image_description";
    }
    return "composite";
}

std::optional<ChunkKind> chunk_kind_from_string(std::string_view name) {
    if (name == "composite") return ChunkKind::Composite;
    if (name == "table") return ChunkKind::Table;
    if (name == "image_description") return ChunkKind::ImageDescription;
    return std::nullopt;
}

std::string Chunk::embedding_text() const {
    if (kind == ChunkKind::Table && text_as_html) {
        return text + "\n" + *text_as_html;
    }
    return text;
}

std::vector<std::string> split_oversize(const std::string& text, int max_chars) {
    if (max_chars <= 0) throw ConfigError("split_oversize requires max_chars > 0");
    std::u32string u = uni::to_u32(text);
    auto max = static_cast<std::size_t>(max_chars);
    if (u.size() <= max) return {text};

    auto is_cjk_terminator = [](char32_t cp) {
        return cp == 0x3002 /* 。 */ || cp == 0xFF01 /* ！ */ || cp == 0xFF1F /* ？ */;
    };

    std::vector<std::string> pieces;
    std::size_t pos = 0;
    while (u.size() - pos > max) {
        std::size_t window_end = pos + max; // exclusive upper bound of this piece
        std::size_t cut = 0;
        // Preferred: the last sentence end inside the window. A latin period
        // only counts when followed by whitespace, so "3.1" stays intact.
        for (std::size_t p = window_end; p > pos; --p) {
            char32_t prev = u[p - 1];
            if (is_cjk_terminator(prev) || (prev == U'.' && uni::is_space(u[p]))) {
                cut = p;
                break;
            }
        }
        if (cut == 0) {
            // Next: the last whitespace; the space starts the following piece.
            for (std::size_t p = window_end; p > pos; --p) {
                if (uni::is_space(u[p])) {
                    cut = p;
                    break;
                }
            }
        }
        if (cut <= pos) cut = window_end; // hard cut, the CJK path
        pieces.push_back(uni::to_utf8(u.substr(pos, cut - pos)));
        pos = cut;
    }
    pieces.push_back(uni::to_utf8(u.substr(pos)));
    return pieces;
}

namespace {

bool is_image_like(const Element& el) {
    return el.kind == ElementKind::Image ||
           (el.metadata.derived_from && *el.metadata.derived_from == "image");
}

struct Section {
    std::optional<std::string> title;
    std::vector<const Element*> members; // includes the title element
};

std::size_t section_text_length(const Section& s) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        if (i) ++total; // joiner
        total += uni::length(s.members[i]->text);
    }
    return total;
}

bool section_has_table_or_image(const Section& s) {
    return std::any_of(s.members.begin(), s.members.end(), [](const Element* el) {
        return el->kind == ElementKind::Table || is_image_like(*el);
    });
}

class ChunkBuilder {
public:
    explicit ChunkBuilder(const ChunkingConfig& cfg) : cfg_(cfg) {}

    std::vector<Chunk> take() { return std::move(out_); }

    void emit_section(const Section& section) {
        section_title_ = section.title;
        first_chunk_of_section_ = true;
        pending_.clear();
        pending_len_ = 0;

        for (const Element* el : section.members) {
            if (el->kind == ElementKind::Table) {
                flush_pending();
                emit_table(*el);
                continue;
            }
            if (is_image_like(*el)) {
                flush_pending();
                emit_image(*el);
                continue;
            }
            append_composite(*el);
        }
        flush_pending();
    }

private:
    struct Piece {
        int seq;
        std::string text;
    };

    void append_composite(const Element& el) {
        std::size_t len = uni::length(el.text);
        auto cap = static_cast<std::size_t>(cfg_.max_characters);
        auto soft = static_cast<std::size_t>(cfg_.new_after_n_chars);

        if (len > cap) {
            flush_pending();
            auto pieces = split_oversize(el.text, cfg_.max_characters);
            for (const std::string& piece : pieces) {
                push_chunk(ChunkKind::Composite, {Piece{el.seq, piece}}, std::nullopt,
                           el.metadata.source_name);
            }
            return;
        }
        std::size_t joiner = pending_.empty() ? 0 : 1;
        if (!pending_.empty() && pending_len_ + joiner + len > soft) {
            flush_pending();
            joiner = 0;
        }
        pending_.push_back(Piece{el.seq, el.text});
        pending_source_ = el.metadata.source_name;
        pending_len_ += joiner + len;
    }

    void flush_pending() {
        if (pending_.empty()) return;
        push_chunk(ChunkKind::Composite, std::move(pending_), std::nullopt, pending_source_);
        pending_.clear();
        pending_len_ = 0;
    }

    void emit_table(const Element& el) {
        // Flat text prefixed with the caption when one is known; the HTML
        // form rides along in text_as_html.
        std::string text = el.text;
        if (el.metadata.caption && !el.metadata.caption->empty()) {
            text = *el.metadata.caption + "\n" + text;
        }
        emit_capped(ChunkKind::Table, el, text, el.metadata.text_as_html);
    }

    void emit_image(const Element& el) {
        emit_capped(ChunkKind::ImageDescription, el, el.text, std::nullopt);
    }

    // Emits the text as one chunk, or several when it exceeds the cap; the
    // html payload is carried on every piece.
    void emit_capped(ChunkKind kind, const Element& el, const std::string& text,
                     const std::optional<std::string>& html) {
        if (uni::length(text) <= static_cast<std::size_t>(cfg_.max_characters)) {
            push_chunk(kind, {Piece{el.seq, text}}, html, el.metadata.source_name);
            return;
        }
        bool first = true;
        for (const std::string& piece : split_oversize(text, cfg_.max_characters)) {
            push_chunk(kind, {Piece{el.seq, piece}}, html, el.metadata.source_name,
                       /*force_continuation=*/!first);
            first = false;
        }
    }

    void push_chunk(ChunkKind kind, std::vector<Piece> pieces,
                    const std::optional<std::string>& html, const std::string& source_name,
                    bool force_continuation = false) {
        Chunk chunk;
        chunk.kind = kind;
        chunk.section_title = section_title_;
        chunk.text_as_html = html;
        chunk.source_name = source_name;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) chunk.text += '\n';
            chunk.text += pieces[i].text;
            chunk.element_seqs.push_back(pieces[i].seq);
        }
        chunk.element_seqs.erase(
            std::unique(chunk.element_seqs.begin(), chunk.element_seqs.end()),
            chunk.element_seqs.end());
        chunk.char_count = static_cast<int>(uni::length(chunk.text));

        // A chunk starting at a Title/Table/image boundary is a section
        // start; everything after it in the same section is a continuation,
        // as are trailing pieces of a hard-split table or image chunk.
        bool boundary_start = first_chunk_of_section_ || kind == ChunkKind::Table ||
                              kind == ChunkKind::ImageDescription;
        chunk.continuation = force_continuation || !boundary_start;
        first_chunk_of_section_ = false;

        int first_seq = chunk.element_seqs.empty() ? -1 : chunk.element_seqs.front();
        std::string id_input = source_name;
        id_input += '\x1f';
        id_input += std::to_string(first_seq);
        id_input += '\x1f';
        id_input += std::to_string(out_.size());
        id_input += '\x1f';
        id_input += chunk.text;
        chunk.id = sha256_hex(id_input, 32);

        out_.push_back(std::move(chunk));
    }

    const ChunkingConfig& cfg_;
    std::vector<Chunk> out_;
    std::optional<std::string> section_title_;
    bool first_chunk_of_section_ = true;
    std::vector<Piece> pending_;
    std::size_t pending_len_ = 0;
    std::string pending_source_;
};

} // namespace

std::vector<Chunk> chunk_by_title(const std::vector<Element>& elements,
                                  const ChunkingConfig& cfg) {
    cfg.validate();

    // Sections run from each Title to the next; elements before the first
    // Title form a preamble section without a title.
    std::vector<Section> sections;
    for (const Element& el : elements) {
        if (el.kind == ElementKind::Title) {
            Section s;
            s.title = el.text;
            s.members.push_back(&el);
            sections.push_back(std::move(s));
            continue;
        }
        if (sections.empty()) sections.push_back(Section{});
        sections.back().members.push_back(&el);
    }

    // Small sections merge forward into the following section. Sections
    // containing tables or images stay separate; the merged section keeps
    // the first section's title.
    if (cfg.combine_text_under_n_chars > 0) {
        std::vector<Section> merged;
        for (Section& s : sections) {
            bool can_merge =
                !merged.empty() && !section_has_table_or_image(merged.back()) &&
                !section_has_table_or_image(s) &&
                section_text_length(merged.back()) <
                    static_cast<std::size_t>(cfg.combine_text_under_n_chars);
            if (can_merge) {
                merged.back().members.insert(merged.back().members.end(), s.members.begin(),
                                             s.members.end());
                if (!merged.back().title) merged.back().title = s.title;
            } else {
                merged.push_back(std::move(s));
            }
        }
        sections = std::move(merged);
    }

    ChunkBuilder builder(cfg);
    for (const Section& section : sections) builder.emit_section(section);
    return builder.take();
}

} // namespace docpipe
