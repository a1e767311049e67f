#include <doctest.h>

#include <algorithm>

#include "docpipe/digest.hpp"
#include "docpipe/enricher.hpp"
#include "docpipe/errors.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/html_reader.hpp"

using namespace docpipe;
using namespace docpipe::test;

namespace {

Element narrative(const std::string& text, int seq) {
    Element el;
    el.kind = ElementKind::NarrativeText;
    el.text = text;
    el.seq = seq;
    return el;
}

Element table_element(const TableBlock& table, int seq) {
    Element el;
    el.kind = ElementKind::Table;
    el.text = render_table_text(table);
    el.table = table;
    el.seq = seq;
    return el;
}

Element image_element(const std::string& ref, int seq) {
    Element el;
    el.kind = ElementKind::Image;
    el.metadata.image_ref = ref;
    el.seq = seq;
    return el;
}

// Recovered anchors joined the same way render_table_text joins the grid.
std::string join_recovered(const HtmlTable& html) {
    std::string out;
    for (std::size_t r = 0; r < html.rows.size(); ++r) {
        if (r) out += '\n';
        for (std::size_t c = 0; c < html.rows[r].size(); ++c) {
            if (c) out += ' ';
            out += html.rows[r][c].text;
        }
    }
    return out;
}

void check_round_trip(const TableBlock& table,
                      const std::optional<std::string>& caption = std::nullopt) {
    std::string html = render_table_html(table, caption);
    HtmlTable recovered = read_html_table(html);

    // Anchor-level equality: texts and spans in document order.
    REQUIRE(recovered.rows.size() == table.grid.size());
    for (std::size_t r = 0; r < table.grid.size(); ++r) {
        REQUIRE(recovered.rows[r].size() == table.grid[r].size());
        for (std::size_t c = 0; c < table.grid[r].size(); ++c) {
            CHECK(recovered.rows[r][c].text == table.grid[r][c].text);
            CHECK(recovered.rows[r][c].colspan == std::max(table.grid[r][c].col_span, 1));
            CHECK(recovered.rows[r][c].rowspan == std::max(table.grid[r][c].row_span, 1));
        }
    }

    // Expanded-matrix equality against the library's own expansion.
    ExpandedGrid grid = expand_grid(table);
    REQUIRE(recovered.expanded.size() == grid.rows);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        REQUIRE(recovered.expanded[r].size() == grid.cols);
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const Cell* cell = grid.at(r, c);
            CHECK(recovered.expanded[r][c] == (cell ? cell->text : ""));
        }
    }

    // Dual-storage consistency: flat text equals the join of the recovered
    // anchor matrix.
    CHECK(render_table_text(table) == join_recovered(recovered));

    CHECK(recovered.caption == caption);
}

} // namespace

TEST_SUITE_BEGIN("enricher");

TEST_CASE("flat text of the wastewater table contains the COD row") {
    std::string flat = render_table_text(wastewater_table());
    CHECK(flat.find("COD 300 211.6 ± 48.2 50 40") != std::string::npos);
}

TEST_CASE("flat text basics") {
    TableBlock one;
    one.grid = {{Cell{"x"}}};
    CHECK(render_table_text(one) == "x");

    TableBlock spanned;
    spanned.grid = {{Cell{"hdr", 1, 2}}, {Cell{"a"}, Cell{"b"}}};
    CHECK(render_table_text(spanned) == "hdr\na b");
}

TEST_CASE("html contains the COD row as adjacent cells") {
    std::string html = render_table_html(wastewater_table());
    CHECK(html.find("<td>COD</td><td>300</td><td>211.6 ± 48.2</td><td>50</td><td>40</td>") !=
          std::string::npos);
    CHECK(html.find("colspan=\"2\"") != std::string::npos);
    CHECK(html.find("<thead>") != std::string::npos);
}

TEST_CASE("html corner cases") {
    TableBlock empty;
    CHECK(render_table_html(empty) == "<table><tbody></tbody></table>");

    TableBlock escaped;
    escaped.grid = {{Cell{"a<b"}, Cell{"x&y"}, Cell{"c>d"}}, {Cell{"1"}, Cell{"2"}, Cell{"3"}}};
    std::string html = render_table_html(escaped);
    CHECK(html.find("a&lt;b") != std::string::npos);
    CHECK(html.find("x&amp;y") != std::string::npos);
    CHECK(html.find("c&gt;d") != std::string::npos);
    CHECK(html.find("a<b") == std::string::npos);
}

TEST_CASE("header heuristic without explicit flags") {
    // Textual first row over data rows: becomes thead.
    TableBlock table;
    table.grid = {{Cell{"name"}, Cell{"value"}}, {Cell{"COD"}, Cell{"300"}}};
    std::string html = render_table_html(table);
    CHECK(html.find("<thead><tr><th>name</th><th>value</th></tr></thead>") != std::string::npos);

    // Numeric-majority first row: no thead.
    TableBlock numeric;
    numeric.grid = {{Cell{"1.5"}, Cell{"300"}}, {Cell{"2.5"}, Cell{"400"}}};
    CHECK(render_table_html(numeric).find("<thead>") == std::string::npos);

    // Single-row table: no thead.
    TableBlock single;
    single.grid = {{Cell{"only"}}};
    CHECK(render_table_html(single).find("<thead>") == std::string::npos);
}

TEST_CASE("round-trip recovers all three paper tables") {
    check_round_trip(wastewater_table());
    check_round_trip(recyclates_table());
    check_round_trip(cctv_table(), cctv_table_caption());
}

TEST_CASE("round-trip property over random spanned tables") {
    Rng rng(424242);
    for (int iter = 0; iter < 200; ++iter) {
        TableBlock table;
        int rows = std::uniform_int_distribution<int>(0, 5)(rng);
        std::vector<int> hangover; // columns blocked by rowspans, per remaining rows
        for (int r = 0; r < rows; ++r) {
            std::vector<Cell> row;
            int cols = std::uniform_int_distribution<int>(1, 4)(rng);
            for (int c = 0; c < cols; ++c) {
                Cell cell;
                cell.text = random_prose(rng, 0, 8);
                cell.col_span = std::uniform_int_distribution<int>(1, 3)(rng);
                cell.row_span = std::uniform_int_distribution<int>(1, 3)(rng);
                cell.is_header = r == 0;
                row.push_back(std::move(cell));
            }
            table.grid.push_back(std::move(row));
        }
        std::optional<std::string> caption;
        if (std::uniform_int_distribution<int>(0, 1)(rng)) {
            caption = "Table 9 " + random_prose(rng, 1, 6);
        }
        check_round_trip(table, caption);
    }
}

TEST_CASE("caption association: nearest match, preceding wins ties") {
    std::vector<Element> elements;
    elements.push_back(narrative(cctv_table_caption(), 0));
    elements.push_back(table_element(cctv_table(), 1));
    associate_captions(elements);
    CHECK(elements[1].metadata.caption == cctv_table_caption());
    REQUIRE(elements[1].metadata.text_as_html.has_value());
    CHECK(elements[1].metadata.text_as_html->rfind("<pre>", 0) == 0);
    // The caption element itself stays in the sequence.
    CHECK(elements[0].kind == ElementKind::NarrativeText);

    SUBCASE("no matching neighbor leaves the caption absent") {
        std::vector<Element> lone{narrative("not a caption", 0),
                                  table_element(wastewater_table(), 1)};
        associate_captions(lone);
        CHECK_FALSE(lone[1].metadata.caption.has_value());
        CHECK(lone[1].metadata.text_as_html.has_value()); // html still rendered
    }

    SUBCASE("preceding candidate beats the following one") {
        std::vector<Element> both{narrative("Table 1 before", 0),
                                  table_element(wastewater_table(), 1),
                                  narrative("Table 2 after", 2)};
        associate_captions(both);
        CHECK(both[1].metadata.caption == "Table 1 before");
    }

    SUBCASE("figure patterns match the following window for images") {
        std::vector<Element> fig{image_element("img", 0), narrative("图 3-1 基本过程", 1)};
        associate_captions(fig);
        CHECK(fig[0].metadata.caption == "图 3-1 基本过程");
    }

    SUBCASE("window bounds the search") {
        std::vector<Element> far{narrative("Table 1 caption", 0), narrative("filler a", 1),
                                 narrative("filler b", 2), table_element(wastewater_table(), 3)};
        associate_captions(far);
        CHECK_FALSE(far[3].metadata.caption.has_value());
    }
}

TEST_CASE("caption pattern needs the marker and a number") {
    CaptionRule rule;
    CHECK(matches_caption_pattern("Table 1 Wastewater characteristics.", rule.table_patterns));
    CHECK(matches_caption_pattern("Tab.3 Something", rule.table_patterns));
    CHECK(matches_caption_pattern("表1 CCTV、QV和声呐的适用性与优缺点", rule.table_patterns));
    CHECK_FALSE(matches_caption_pattern("Table of contents", rule.table_patterns));
    CHECK_FALSE(matches_caption_pattern("a Table 1 inside", rule.table_patterns));
    CHECK(matches_caption_pattern("Fig. 4 Results", rule.figure_patterns));
    CHECK(matches_caption_pattern("图 3-1 SBR 的基本运行操作过程", rule.figure_patterns));
    CHECK_FALSE(matches_caption_pattern("figure skating", rule.figure_patterns));
}

TEST_CASE("describe_images substitutes in place with the mock client") {
    std::map<std::string, MediaItem> media;
    media["img1"] = MediaItem{{1, 2, 3}, "image/png"};
    media["img2"] = MediaItem{{4, 5, 6}, "image/jpeg"};

    std::vector<Element> elements;
    elements.push_back(narrative("图 3-1 SBR 的基本运行操作过程", 0));
    elements.push_back(image_element("img1", 1));
    elements[1].metadata.caption = "图 3-1 SBR 的基本运行操作过程";
    elements.push_back(narrative("between", 2));
    elements.push_back(image_element("img2", 3));

    MockVisionClient client;
    describe_images(elements, media, client);

    REQUIRE(elements.size() == 4);
    CHECK(elements[1].kind == ElementKind::NarrativeText);
    CHECK(elements[1].metadata.derived_from == "image");
    CHECK(elements[1].seq == 1);
    std::string_view bytes1("\x01\x02\x03", 3);
    CHECK(elements[1].text == "IMG-DESC:" + sha256_hex(bytes1, 16));
    CHECK(elements[3].kind == ElementKind::NarrativeText);

    // The prompt carried the caption.
    auto prompts = client.prompts_seen();
    REQUIRE(prompts.size() == 2);
    bool found = false;
    for (const std::string& prompt : prompts) {
        if (prompt.find("图 3-1 SBR 的基本运行操作过程") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("vision failure keeps the image element and continues") {
    struct FailingClient : VisionClient {
        std::string describe(std::span<const std::uint8_t>, const std::string&,
                             const std::string&) override {
            throw VisionUnavailableError("down for the test");
        }
    };
    std::map<std::string, MediaItem> media;
    media["img1"] = MediaItem{{1}, "image/png"};

    std::vector<Element> elements{image_element("img1", 0), narrative("after", 1),
                                  image_element("missing", 2)};
    FailingClient client;
    describe_images(elements, media, client);
    REQUIRE(elements.size() == 3);
    CHECK(elements[0].kind == ElementKind::Image);
    REQUIRE(elements[0].metadata.error.has_value());
    CHECK(elements[1].text == "after");
    CHECK(elements[2].metadata.error == "unresolved image reference");
}

TEST_CASE("describe_images is deterministic under concurrency") {
    std::map<std::string, MediaItem> media;
    std::vector<Element> elements;
    for (int i = 0; i < 20; ++i) {
        std::string id = "img" + std::to_string(i);
        media[id] = MediaItem{{static_cast<std::uint8_t>(i)}, "image/png"};
        elements.push_back(image_element(id, i));
    }
    MockVisionClient a;
    MockVisionClient b;
    auto one = elements;
    auto two = elements;
    describe_images(one, media, a, 4);
    describe_images(two, media, b, 1);
    REQUIRE(one.size() == two.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].text == two[i].text);
        CHECK(one[i].seq == two[i].seq);
    }
}

TEST_SUITE_END();
