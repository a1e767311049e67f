#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "docpipe/jsonl.hpp"
#include "support/docx_builder.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;
using namespace docpipe;
using namespace docpipe::test;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(DOCPIPE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, n);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("docpipe_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int value = 0;
        return value;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("parse writes elements jsonl") {
    TempDir dir;
    write_file(dir.file("doc.docx"), bilingual_docx());
    auto result = run_cli("parse " + dir.file("doc.docx") + " --mock --out " +
                          dir.file("elements.jsonl"));
    CHECK(result.exit_code == 0);
    std::ifstream in(dir.file("elements.jsonl"));
    auto elements = read_elements_jsonl(in);
    CHECK(elements.size() > 10);
    for (const Element& el : elements) {
        CHECK(el.kind != ElementKind::Header);
        CHECK(el.kind != ElementKind::Footer);
    }
}

TEST_CASE("parse of an empty document writes an empty file and exits 0") {
    TempDir dir;
    write_file(dir.file("empty.docx"), DocxBuilder().build());
    auto result =
        run_cli("parse " + dir.file("empty.docx") + " --out " + dir.file("out.jsonl"));
    CHECK(result.exit_code == 0);
    CHECK(read_file(dir.file("out.jsonl")).empty());
}

TEST_CASE("invalid input exits 1") {
    TempDir dir;
    write_file(dir.file("bad.docx"), "this is not a zip archive");
    auto result = run_cli("parse " + dir.file("bad.docx") + " --out " + dir.file("o.jsonl"));
    CHECK(result.exit_code == 1);

    auto missing = run_cli("parse " + dir.file("nonexistent.docx"));
    CHECK(missing.exit_code == 1);
}

TEST_CASE("config violations exit 2") {
    TempDir dir;
    write_file(dir.file("e.jsonl"), "");
    auto result =
        run_cli("chunk " + dir.file("e.jsonl") + " --max-characters 0 --out " + dir.file("c"));
    CHECK(result.exit_code == 2);

    auto unknown_flag = run_cli("parse x --no-such-flag");
    CHECK(unknown_flag.exit_code == 2);
}

TEST_CASE("staged pipeline: parse, chunk, embed, upsert, query") {
    TempDir dir;
    write_file(dir.file("doc.docx"), bilingual_docx());
    CHECK(run_cli("parse " + dir.file("doc.docx") + " --mock --out " + dir.file("e.jsonl"))
              .exit_code == 0);
    CHECK(run_cli("chunk " + dir.file("e.jsonl") + " --out " + dir.file("c.jsonl")).exit_code ==
          0);
    CHECK(run_cli("embed " + dir.file("c.jsonl") + " --mock --out " + dir.file("v.json"))
              .exit_code == 0);
    CHECK(run_cli("index upsert --embeddings " + dir.file("v.json") + " --chunks " +
                  dir.file("c.jsonl") + " --index " + dir.file("idx.vidx"))
              .exit_code == 0);

    auto stats = run_cli("index stats --index " + dir.file("idx.vidx"));
    CHECK(stats.exit_code == 0);
    auto stats_json = nlohmann::json::parse(stats.out);
    CHECK(stats_json["dimension"] == 1536);
    CHECK(stats_json["total"].get<int>() > 10);

    // Self-retrieval through the CLI: query one chunk's exact text.
    std::ifstream chunks_in(dir.file("c.jsonl"));
    auto chunks = read_chunks_jsonl(chunks_in);
    REQUIRE_FALSE(chunks.empty());
    const Chunk* probe = nullptr;
    for (const Chunk& c : chunks) {
        if (c.kind == ChunkKind::Composite && !c.text.empty()) {
            probe = &c;
            break;
        }
    }
    REQUIRE(probe != nullptr);
    write_file(dir.file("query.txt"), probe->text);
    // Shell quoting of arbitrary chunk text is fragile; use a simple probe.
    auto query = run_cli("index query --index " + dir.file("idx.vidx") +
                         " --mock --text \"Aerobic Granular Sludge\" --top-k 3");
    CHECK(query.exit_code == 0);
    auto query_json = nlohmann::json::parse(query.out);
    CHECK(query_json["matches"].size() == 3);
    CHECK(query_json.contains("context"));

    // Delete everything we can see and confirm the count drops.
    std::string first_id = query_json["matches"][0]["id"].get<std::string>();
    auto del = run_cli("index delete --index " + dir.file("idx.vidx") + " --id " + first_id);
    CHECK(del.exit_code == 0);
    auto stats2 = run_cli("index stats --index " + dir.file("idx.vidx"));
    CHECK(nlohmann::json::parse(stats2.out)["total"].get<int>() ==
          stats_json["total"].get<int>() - 1);
}

TEST_CASE("parse accepts plain document json and rejects schema violations") {
    TempDir dir;
    write_file(dir.file("doc.json"),
               R"({"pd_version":1,"blocks":[{"para":{"text":"Title","outline_level":0}},)"
               R"({"para":{"text":"Body paragraph."}}]})");
    auto result =
        run_cli("parse " + dir.file("doc.json") + " --out " + dir.file("e.jsonl"));
    CHECK(result.exit_code == 0);
    std::ifstream in(dir.file("e.jsonl"));
    auto elements = read_elements_jsonl(in);
    REQUIRE(elements.size() == 2);
    CHECK(elements[0].kind == ElementKind::Title);
    CHECK(elements[0].metadata.source_name == "doc.json");

    write_file(dir.file("bad.json"), R"({"blocks":[{"para":{"bogus":1}}]})");
    CHECK(run_cli("parse " + dir.file("bad.json")).exit_code == 1);
}

TEST_CASE("pipeline over two inputs merges outputs in input order") {
    TempDir dir;
    write_file(dir.file("a.json"),
               R"({"blocks":[{"para":{"text":"Alpha","outline_level":0}},)"
               R"({"para":{"text":"alpha body text"}}]})");
    write_file(dir.file("b.json"),
               R"({"blocks":[{"para":{"text":"Beta","outline_level":0}},)"
               R"({"para":{"text":"beta body text"}}]})");
    auto result = run_cli("pipeline " + dir.file("a.json") + " " + dir.file("b.json") +
                          " --mock --index " + dir.file("i.vidx") + " --out-dir " +
                          dir.path.string());
    CHECK(result.exit_code == 0);

    std::ifstream chunks_in(dir.file("chunks.jsonl"));
    auto chunks = read_chunks_jsonl(chunks_in);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].source_name == "a.json");
    CHECK(chunks[1].source_name == "b.json");

    auto stats = run_cli("index stats --index " + dir.file("i.vidx"));
    CHECK(nlohmann::json::parse(stats.out)["total"] == 2);
}

TEST_CASE("pipeline command produces a queryable index") {
    TempDir dir;
    write_file(dir.file("doc.docx"), bilingual_docx());
    auto result = run_cli("pipeline " + dir.file("doc.docx") + " --mock --index " +
                          dir.file("idx.vidx") + " --out-dir " + dir.path.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir.file("elements.jsonl")));
    CHECK(fs::exists(dir.file("chunks.jsonl")));
    CHECK(fs::exists(dir.file("idx.vidx")));

    auto query = run_cli("index query --index " + dir.file("idx.vidx") +
                         " --mock --text \"排水管网检测技术\"");
    CHECK(query.exit_code == 0);
    auto query_json = nlohmann::json::parse(query.out);
    CHECK(query_json["matches"].size() >= 1);
}

TEST_CASE("flags override config file values") {
    TempDir dir;
    write_file(dir.file("cfg.toml"), "max-characters=100\nnew-after-n-chars=100\n");
    std::ostringstream elements;
    Element el;
    el.kind = ElementKind::NarrativeText;
    el.text = std::string(150, 'x');
    el.seq = 0;
    el.metadata.source_name = "t";
    elements << element_to_jsonl_line(el) << "\n";
    write_file(dir.file("e.jsonl"), elements.str());

    // Config file cap of 100 splits the 150-char element.
    CHECK(run_cli("chunk " + dir.file("e.jsonl") + " --config " + dir.file("cfg.toml") +
                  " --out " + dir.file("c1.jsonl"))
              .exit_code == 0);
    std::ifstream c1(dir.file("c1.jsonl"));
    CHECK(read_chunks_jsonl(c1).size() == 2);

    // The flag overrides the file: no split at 4096.
    CHECK(run_cli("chunk " + dir.file("e.jsonl") + " --config " + dir.file("cfg.toml") +
                  " --max-characters 4096 --new-after-n-chars 4096 --out " + dir.file("c2.jsonl"))
              .exit_code == 0);
    std::ifstream c2(dir.file("c2.jsonl"));
    CHECK(read_chunks_jsonl(c2).size() == 1);

    // Unknown config keys are rejected.
    write_file(dir.file("bad.toml"), "no-such-key=1\n");
    CHECK(run_cli("chunk " + dir.file("e.jsonl") + " --config " + dir.file("bad.toml"))
              .exit_code == 2);
}

TEST_SUITE_END();
