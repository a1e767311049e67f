#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace docpipe {

enum class Region { Body, Header, Footer };

// A run carries either text or an image anchor, never both.
struct Run {
    std::string text;
    std::optional<double> font_size_pts;
    bool bold = false;
    std::optional<std::string> image_anchor; // key into DocumentTree::media

    bool operator==(const Run&) const = default;
};

struct Cell {
    std::string text;
    int row_span = 1;
    int col_span = 1;
    bool is_header = false;

    bool operator==(const Cell&) const = default;
};

struct ParagraphBlock {
    std::vector<Run> runs;
    std::optional<std::string> style_name;
    std::optional<int> outline_level; // 0 = top-level heading
    bool list_marker = false;
    Region region = Region::Body;

    std::string text() const;

    bool operator==(const ParagraphBlock&) const = default;
};

struct TableBlock {
    // Rows of anchor cells: spanned positions are represented once, at the
    // cell that owns them.
    std::vector<std::vector<Cell>> grid;
    std::optional<std::string> caption_hint;
    Region region = Region::Body;

    bool operator==(const TableBlock&) const = default;
};

using Block = std::variant<ParagraphBlock, TableBlock>;

struct MediaItem {
    std::vector<std::uint8_t> bytes;
    std::string content_type;

    bool operator==(const MediaItem&) const = default;
};

struct SkipReport {
    int vector_drawings = 0;

    bool operator==(const SkipReport&) const = default;
};

// Normalized input for the whole pipeline. Header/footer blocks carry their
// region tag and are kept out of body order: headers first, then body
// blocks in document order, then footers.
struct DocumentTree {
    std::vector<Block> blocks;
    std::map<std::string, MediaItem> media;
    std::string source_name;
    SkipReport skips;

    bool operator==(const DocumentTree&) const = default;
};

// The grid expanded the way an HTML renderer would lay it out: every
// position points at its owning anchor cell. All rows end up the same
// width; short rows are padded with detached empty cells.
struct ExpandedGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    // matrix[r][c] = index into `anchors`, or -1 for padding.
    std::vector<std::vector<int>> matrix;
    std::vector<Cell> anchors;

    const Cell* at(std::size_t r, std::size_t c) const {
        int idx = matrix[r][c];
        return idx < 0 ? nullptr : &anchors[static_cast<std::size_t>(idx)];
    }
};

ExpandedGrid expand_grid(const TableBlock& table);

// True when every row of the expanded grid has the same effective width
// without padding.
bool grid_is_rectangular(const TableBlock& table);

} // namespace docpipe
