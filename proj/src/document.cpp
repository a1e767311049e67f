#include "docpipe/document.hpp"

#include <algorithm>

namespace docpipe {

std::string ParagraphBlock::text() const {
    std::string out;
    for (const Run& r : runs) out += r.text;
    return out;
}

namespace {

// HTML-style placement: anchor cells are laid out left to right, skipping
// positions still covered by row spans from rows above.
ExpandedGrid expand_impl(const TableBlock& table, bool* padded) {
    ExpandedGrid out;
    std::vector<int> covered;        // per column: rows still covered below
    std::vector<int> covered_anchor; // per column: owning anchor index

    auto ensure_width = [&](std::size_t w) {
        if (covered.size() < w) {
            covered.resize(w, 0);
            covered_anchor.resize(w, -1);
        }
    };

    for (const auto& row : table.grid) {
        std::vector<int> line(covered.size(), -1);
        for (std::size_t c = 0; c < covered.size(); ++c) {
            if (covered[c] > 0) {
                line[c] = covered_anchor[c];
                --covered[c];
            }
        }
        std::size_t col = 0;
        for (const Cell& cell : row) {
            while (col < line.size() && line[col] >= 0) ++col;
            auto span = static_cast<std::size_t>(std::max(cell.col_span, 1));
            int row_span = std::max(cell.row_span, 1);
            ensure_width(col + span);
            if (line.size() < col + span) line.resize(col + span, -1);

            int idx = static_cast<int>(out.anchors.size());
            out.anchors.push_back(cell);
            out.anchors.back().col_span = static_cast<int>(span);
            out.anchors.back().row_span = row_span;
            for (std::size_t k = 0; k < span; ++k) {
                line[col + k] = idx;
                if (row_span > 1) {
                    covered[col + k] = row_span - 1;
                    covered_anchor[col + k] = idx;
                }
            }
            col += span;
        }
        out.matrix.push_back(std::move(line));
    }

    out.rows = out.matrix.size();
    out.cols = covered.size();
    bool any_gap = false;
    for (auto& line : out.matrix) {
        if (line.size() < out.cols) line.resize(out.cols, -1);
        for (int v : line) {
            if (v < 0) any_gap = true;
        }
    }
    if (padded) *padded = any_gap;
    return out;
}

} // namespace

ExpandedGrid expand_grid(const TableBlock& table) {
    return expand_impl(table, nullptr);
}

bool grid_is_rectangular(const TableBlock& table) {
    bool padded = false;
    expand_impl(table, &padded);
    return !padded;
}

} // namespace docpipe
