#include "support/fixtures.hpp"

#include "support/docx_builder.hpp"

namespace docpipe::test {

namespace {

Cell cell(std::string text, int col_span = 1, int row_span = 1, bool header = false) {
    Cell c;
    c.text = std::move(text);
    c.col_span = col_span;
    c.row_span = row_span;
    c.is_header = header;
    return c;
}

std::vector<Cell> data_row(std::initializer_list<std::string> texts) {
    std::vector<Cell> row;
    for (const std::string& t : texts) row.push_back(cell(t));
    return row;
}

std::vector<Cell> header_row(std::initializer_list<std::string> texts) {
    std::vector<Cell> row;
    for (const std::string& t : texts) row.push_back(cell(t, 1, 1, true));
    return row;
}

} // namespace

TableBlock wastewater_table() {
    TableBlock table;
    table.grid.push_back({cell("Parameter (mg L⁻¹)", 1, 1, true),
                          cell("Designed influent", 1, 1, true),
                          cell("Actual influent", 1, 1, true),
                          cell("Effluent requirements", 2, 1, true)});
    table.grid.push_back(header_row({"", "", "", "Startup phase (and before upgrade)",
                                     "Stable phase"}));
    table.grid.push_back(data_row({"COD", "300", "211.6 ± 48.2", "50", "40"}));
    table.grid.push_back(data_row({"NH₄⁺-N", "50", "48.5 ± 13.1", "5 (8)", "2 (3.5)"}));
    table.grid.push_back(data_row({"TN", "70", "58.4 ± 13.9", "15", "15"}));
    table.grid.push_back(data_row({"TP", "4", "5.8 ± 2.3", "0.5", "0.4"}));
    return table;
}

TableBlock recyclates_table() {
    TableBlock table;
    table.grid.push_back(header_row({"Identifier", "Sensitivity alternative case name",
                                     "Recyclates produced (and consumed in EU27) [Mt]",
                                     "Percentage variation with respect to the base MFA [%]"}));
    table.grid.push_back(data_row({"1", "All manufactured products are consumed", "5.88", "+32%"}));
    table.grid.push_back(
        data_row({"2", "Only finished products are sold to end-consumers", "3.72", "-17%"}));
    table.grid.push_back(data_row({"3", "Reduced stock variation", "6.00", "+35%"}));
    table.grid.push_back(data_row({"4", "Absence of waste trade", "4.71", "+6%"}));
    table.grid.push_back(data_row({"5", "Absence of mixed waste collection", "9.15", "+105%"}));
    table.grid.push_back(data_row({"6", "Absence of mismanaged waste", "5.08", "+14%"}));
    table.grid.push_back(data_row(
        {"7", "Absence of mismanaged waste being recollected and recycled", "3.99", "-11%"}));
    table.grid.push_back(
        data_row({"8",
                  "Revised mismanaged waste assumptions (mismanaged waste only occurs for the "
                  "transport and EEE sectors and it's not recollected for recycling)",
                  "4.04", "-10%"}));
    table.grid.push_back(data_row({"9", "Improved recycling performance", "6.68", "+50%"}));
    return table;
}

TableBlock cctv_table() {
    TableBlock table;
    table.grid.push_back(header_row({"检测仪器", "适用条件", "优点", "缺点"}));
    table.grid.push_back(data_row({"CCTV", "管道内水位不大于管道直径的20%",
                                   "摄像头可随管道机器人进入管道内部,真实反映内部情况",
                                   "使用前需进行封堵、清淤、降水工作"}));
    table.grid.push_back(data_row({"QV", "管道内水位不宜大于管径的1/2,管段长度不宜大于50m",
                                   "通过摄像头可真实反映管道内部情况;设备便携,与CCTV相比更加简便",
                                   "检测前需要排除管内积水;只能在管口进行检测,检测距离短"}));
    table.grid.push_back(data_row({"声呐", "管道内水深深大于300mm",
                                   "使用前无需排空积水,适于高水位地区检测",
                                   "仅可以辅助性判断缺陷,管内积水较少时不适用"}));
    return table;
}

std::string cctv_table_caption() {
    return "表1 CCTV、QV和声呐的适用性与优缺点";
}

std::string bilingual_docx() {
    DocxBuilder builder;
    builder.set_default_size(11.0);
    builder.add_style("Heading1", "heading 1", 16.0, 0);
    builder.add_style("Heading2", "heading 2", 14.0, 1);

    builder.add_header_paragraph("Operations Manual — CONFIDENTIAL");
    builder.add_header_paragraph("第 3 章");
    builder.add_footer_paragraph("Page footer");
    builder.add_footer_paragraph("内部资料");

    ParaOpts h1;
    h1.style_id = "Heading1";
    ParaOpts h2;
    h2.style_id = "Heading2";

    builder.add_paragraph("Aerobic Granular Sludge Upgrade", h1);
    builder.add_paragraph(
        "Full-scale upgrade of activated sludge to continuous-flow aerobic granular sludge "
        "improves effluent quality while reusing existing tanks.");
    builder.add_paragraph("Influent Characteristics", h2);
    builder.add_paragraph("Table 1 Wastewater characteristics.");
    builder.add_table(wastewater_table(), 2);
    builder.add_paragraph(
        "The designed influent concentrations bound the expected operating envelope.");

    builder.add_paragraph("排水管网检测技术", h1);
    builder.add_paragraph("排水管网的检测技术包括影像检查法、电磁检查法与水质水量检查法等。");
    builder.add_paragraph("检测仪器对比", h2);
    builder.add_paragraph(cctv_table_caption());
    builder.add_table(cctv_table(), 1);
    builder.add_paragraph("各类仪器的适用条件差异明显，应结合现场水位选择。");

    builder.add_paragraph("SBR 运行过程", h1);
    builder.add_paragraph("图 3-1 SBR 的基本运行操作过程");
    builder.add_image("sbr.png", std::string("\x89PNG\r\n\x1a\n", 8) + "sbr-process-fixture");
    builder.add_paragraph("序批式生物反应器经历进水、反应、沉淀、排泥与排水五个阶段。");

    builder.add_paragraph("Material Flow Analysis", h1);
    builder.add_paragraph(
        "Transfer coefficients allocate the flow of plastics between the stages of the value "
        "chain while keeping mass balance.");
    builder.add_paragraph("Fig. 2 Three-step sector-level material flow analysis");
    builder.add_image("mfa.png", std::string("\x89PNG\r\n\x1a\n", 8) + "mfa-diagram-fixture");

    builder.add_paragraph("Granulation Mechanisms", h1);
    builder.add_paragraph(
        "Internal separators change the flow pattern from a single circulation cell to "
        "multiple vortical cells, raising local velocity gradients.");
    builder.add_paragraph("微生物群落结构", h1);
    builder.add_paragraph("反硝化菌群的相对丰度随颗粒化进程显著提升。");
    builder.add_paragraph("Effluent Requirements", h1);
    builder.add_paragraph(
        "Stable-phase chemical oxygen demand must stay below forty milligrams per litre.");
    builder.add_paragraph("树脂再生剂", h1);
    builder.add_paragraph("强酸性阳离子交换树脂再生通常使用盐酸，浓度范围为百分之三至百分之九。");
    builder.add_paragraph("Zero-shot Evaluation", h1);
    builder.add_paragraph(
        "Retrieval-augmented answers score higher on clarity, specificity and technical depth "
        "than zero-shot answers.");
    builder.add_paragraph("结论", h1);
    builder.add_paragraph("矢量知识库显著增强了大语言模型在专业领域的问答能力。");
    return builder.build();
}

} // namespace docpipe::test
