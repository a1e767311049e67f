// docpipe: parse .docx / plain JSON documents into elements, chunk them by
// title, embed the chunks and serve cosine top-k retrieval from a local
// index file. Structured logs go to stderr; data goes to stdout or files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "docpipe/docx_reader.hpp"
#include "docpipe/errors.hpp"
#include "docpipe/jsonl.hpp"
#include "docpipe/net.hpp"
#include "docpipe/pipeline.hpp"
#include "docpipe/plain_document.hpp"
#include "docpipe/retriever.hpp"
#include "docpipe/unicode.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRemoteError = 3;

void log_line(const std::string& level, const std::string& msg) {
    std::fprintf(stderr, "level=%s msg=\"%s\"\n", level.c_str(), msg.c_str());
}

std::vector<std::string> bullet_glyphs; // --bullet-char accumulator

// Every flag has a config-file equivalent; flags override the file, the file
// overrides defaults. Secrets never appear in files, only env var names.
void add_config_options(CLI::App& app, docpipe::PipelineConfig& cfg) {
    app.set_config("--config", "", "Configuration file (TOML-style key=value)");
    app.allow_config_extras(false);

    static int config_version = 1;
    app.add_option("--config-version", config_version, "Config schema version")
        ->check(CLI::IsMember({1}));

    app.add_option("--size-ratio-threshold", cfg.partition.size_ratio_threshold,
                   "Title rule: min font size ratio vs body mode");
    app.add_option("--max-title-words", cfg.partition.max_title_words,
                   "Title rule: max latin words");
    app.add_option("--max-title-chars-cjk", cfg.partition.max_title_chars_cjk,
                   "Title rule: max CJK characters");
    app.add_option("--heading-style-pattern", cfg.partition.heading_style_patterns,
                   "Style name substrings treated as headings");

    app.add_flag("--collapse-fullwidth-space,!--no-collapse-fullwidth-space",
                 cfg.clean.collapse_fullwidth_space,
                 "Collapse U+3000 ideographic spaces like ASCII spaces");
    app.add_option("--bullet-char", bullet_glyphs,
                   "Leading bullet glyph to strip (repeatable; replaces the default set)");

    app.add_option("--combine-text-under-n-chars", cfg.chunking.combine_text_under_n_chars,
                   "Merge sections shorter than this into the next one (0 = never)");
    app.add_option("--new-after-n-chars", cfg.chunking.new_after_n_chars,
                   "Soft chunk boundary in characters");
    app.add_option("--max-characters", cfg.chunking.max_characters,
                   "Hard chunk cap in characters");
    app.add_flag("--multipage-sections,!--no-multipage-sections",
                 cfg.chunking.multipage_sections,
                 "Accepted for compatibility; no effect on docx input");

    app.add_option("--embedding-endpoint", cfg.embedding.endpoint, "Embedding service URL");
    app.add_option("--embedding-model", cfg.embedding.model, "Embedding model name");
    app.add_option("--embedding-key-env", cfg.embedding.key_env,
                   "Environment variable holding the API key");
    app.add_option("--batch-size", cfg.embedding.batch_size, "Embedding batch size");
    app.add_flag("--mock", cfg.embedding.mock,
                 "Deterministic offline clients (embedding and vision)");
    app.add_option("--mock-seed", cfg.embedding.mock_seed, "Seed for the mock embedder");
    app.add_option("--embedding-timeout", cfg.embedding.timeout_seconds,
                   "Embedding request timeout, seconds");
    app.add_option("--embedding-retries", cfg.embedding.max_retries,
                   "Retries on transport failures");
    app.add_option("--embedding-in-flight", cfg.embedding.max_in_flight,
                   "Max concurrent embedding batches");

    app.add_option("--vision-endpoint", cfg.vision.endpoint,
                   "Vision service URL (empty: images keep an error note)");
    app.add_option("--vision-model", cfg.vision.model, "Vision model name");
    app.add_option("--vision-key-env", cfg.vision.key_env,
                   "Environment variable holding the vision API key");
    app.add_option("--vision-timeout", cfg.vision.timeout_seconds,
                   "Vision request timeout, seconds");
    app.add_option("--vision-retries", cfg.vision.max_retries,
                   "Retries on vision transport failures");
    app.add_option("--vision-in-flight", cfg.vision.max_in_flight,
                   "Max concurrent vision calls");

    app.add_option("--index", cfg.index.path, "Index file path");
    app.add_option("--namespace", cfg.index.ns, "Index namespace");
    app.add_option("--top-k", cfg.retrieval.top_k, "Retrieval depth");
    app.add_option("--context-budget", cfg.retrieval.context_budget,
                   "Context budget in characters");
    app.add_flag("--dedupe", cfg.retrieval.dedupe, "Drop duplicate chunk texts from results");
    app.add_option("--jobs", cfg.jobs, "Document worker pool size (0 = CPU count)");
}

docpipe::Metadata parse_filter(const std::vector<std::string>& pairs) {
    docpipe::Metadata filter;
    for (const std::string& pair : pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw docpipe::ConfigError("--filter expects key=value, got: " + pair);
        }
        filter[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return filter;
}

nlohmann::ordered_json match_to_json(const docpipe::ScoredMatch& match) {
    auto str = [&](const char* key) -> std::string {
        auto it = match.metadata.find(key);
        if (it == match.metadata.end()) return {};
        if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        return {};
    };
    nlohmann::ordered_json j;
    j["id"] = match.id;
    j["score"] = match.score;
    j["source_name"] = str("source_name");
    j["section_title"] = str("section_title");
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"docpipe: document ingestion, chunking, embedding and retrieval"};
    app.require_subcommand(1);

    docpipe::PipelineConfig cfg;
    add_config_options(app, cfg);

    // parse
    auto* cmd_parse = app.add_subcommand("parse", "Parse a document into elements JSONL");
    std::string parse_input;
    std::string parse_out = "elements.jsonl";
    cmd_parse->add_option("input", parse_input, "Input .docx or PlainDocument .json")
        ->required();
    cmd_parse->add_option("--out", parse_out, "Output elements JSONL path");

    // chunk
    auto* cmd_chunk = app.add_subcommand("chunk", "Chunk elements JSONL by title");
    std::string chunk_input;
    std::string chunk_out = "chunks.jsonl";
    cmd_chunk->add_option("input", chunk_input, "Elements JSONL")->required();
    cmd_chunk->add_option("--out", chunk_out, "Output chunks JSONL path");

    // embed
    auto* cmd_embed = app.add_subcommand("embed", "Embed chunks into a vectors manifest");
    std::string embed_input;
    std::string embed_out = "vectors.manifest.json";
    cmd_embed->add_option("input", embed_input, "Chunks JSONL")->required();
    cmd_embed->add_option("--out", embed_out, "Output manifest path (sidecar: <out>.f32)");

    // index
    auto* cmd_index = app.add_subcommand("index", "Operate on the vector index");
    cmd_index->require_subcommand(1);

    auto* index_upsert = cmd_index->add_subcommand("upsert", "Upsert embedded chunks");
    std::string upsert_manifest;
    std::string upsert_chunks;
    index_upsert->add_option("--embeddings", upsert_manifest, "Embeddings manifest")->required();
    index_upsert->add_option("--chunks", upsert_chunks, "Chunks JSONL (metadata source)")
        ->required();

    auto* index_query = cmd_index->add_subcommand("query", "Embed a query and search");
    std::string query_text;
    index_query->add_option("--text", query_text, "Query text")->required();

    auto* index_stats = cmd_index->add_subcommand("stats", "Print index statistics");

    auto* index_delete = cmd_index->add_subcommand("delete", "Delete records by id");
    std::vector<std::string> delete_ids;
    index_delete->add_option("--id", delete_ids, "Record id (repeatable)")->required();

    std::vector<std::string> filter_pairs;
    index_query->add_option("--filter", filter_pairs, "Metadata filter key=value (repeatable)");

    // pipeline
    auto* cmd_pipeline =
        app.add_subcommand("pipeline", "parse -> clean -> enrich -> chunk -> embed -> upsert");
    std::vector<std::string> pipeline_inputs;
    std::string pipeline_out_dir = ".";
    cmd_pipeline->add_option("inputs", pipeline_inputs, "Input documents")->required();
    cmd_pipeline->add_option("--out-dir", pipeline_out_dir, "Directory for stage outputs");

    // Global options remain usable after any subcommand name.
    for (CLI::App* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (!bullet_glyphs.empty()) {
            std::set<char32_t> glyphs;
            for (const std::string& glyph : bullet_glyphs) {
                std::u32string u = docpipe::uni::to_u32(glyph);
                if (u.size() != 1) {
                    throw docpipe::ConfigError("--bullet-char expects a single character, got: " +
                                               glyph);
                }
                glyphs.insert(u[0]);
            }
            cfg.clean.bullet_chars = std::move(glyphs);
        }
        cfg.validate();

        if (*cmd_parse) {
            docpipe::DocumentTree tree = docpipe::open_input_file(parse_input);
            if (tree.skips.vector_drawings > 0) {
                log_line("info", "skipped " + std::to_string(tree.skips.vector_drawings) +
                                     " non-raster drawings in " + tree.source_name);
            }
            auto vision = docpipe::make_vision_client(cfg);
            auto elements = docpipe::run_parse_stages(tree, cfg, *vision);
            std::ostringstream buffer;
            docpipe::write_elements_jsonl(buffer, elements);
            docpipe::atomic_write_file(parse_out, std::move(buffer).str());
            log_line("info", "wrote " + std::to_string(elements.size()) + " elements to " +
                                 parse_out);
            return kExitOk;
        }

        if (*cmd_chunk) {
            std::ifstream in(chunk_input);
            if (!in) throw docpipe::Error("cannot open " + chunk_input);
            auto elements = docpipe::read_elements_jsonl(in);
            auto chunks = docpipe::chunk_by_title(elements, cfg.chunking);
            std::ostringstream buffer;
            docpipe::write_chunks_jsonl(buffer, chunks);
            docpipe::atomic_write_file(chunk_out, std::move(buffer).str());
            log_line("info",
                     "wrote " + std::to_string(chunks.size()) + " chunks to " + chunk_out);
            return kExitOk;
        }

        if (*cmd_embed) {
            std::ifstream in(embed_input);
            if (!in) throw docpipe::Error("cannot open " + embed_input);
            auto chunks = docpipe::read_chunks_jsonl(in);
            auto client = docpipe::make_embedding_client(cfg);
            auto result = docpipe::embed_chunks(chunks, *client, cfg.embedding.batch_size,
                                                cfg.embedding.max_in_flight);
            docpipe::write_embeddings_manifest(embed_out, result, cfg.embedding.model,
                                               client->dimension());
            log_line("info", "embedded " + std::to_string(result.embedded.size()) +
                                 " chunks (skipped " + std::to_string(result.skipped_ids.size()) +
                                 " empty) to " + embed_out);
            return kExitOk;
        }

        if (*cmd_index) {
            if (*index_upsert) {
                auto result = docpipe::read_embeddings_manifest(upsert_manifest);
                std::ifstream in(upsert_chunks);
                if (!in) throw docpipe::Error("cannot open " + upsert_chunks);
                auto chunks = docpipe::read_chunks_jsonl(in);
                std::map<std::string, const docpipe::Chunk*> by_id;
                for (const auto& chunk : chunks) by_id[chunk.id] = &chunk;

                auto index = std::filesystem::exists(cfg.index.path)
                                 ? docpipe::VectorIndex::load(cfg.index.path)
                                 : docpipe::VectorIndex();
                std::vector<docpipe::IndexRecord> records;
                for (auto& item : result.embedded) {
                    auto it = by_id.find(item.chunk_id);
                    if (it == by_id.end()) {
                        throw docpipe::SchemaViolationError("embeddings manifest id " +
                                                            item.chunk_id +
                                                            " not present in chunks file");
                    }
                    records.push_back(
                        docpipe::chunk_index_record(*it->second, std::move(item.vector)));
                }
                std::size_t written = index.upsert(std::move(records), cfg.index.ns);
                index.save(cfg.index.path);
                log_line("info", "upserted " + std::to_string(written) + " records into " +
                                     cfg.index.path.string());
                return kExitOk;
            }
            if (*index_query) {
                auto index = docpipe::VectorIndex::load(cfg.index.path);
                auto client = docpipe::make_embedding_client(cfg);
                auto vectors = client->embed_batch({query_text});
                docpipe::Metadata filter = parse_filter(filter_pairs);
                auto matches =
                    index.query(vectors.at(0), cfg.retrieval.top_k, cfg.index.ns,
                                filter.empty() ? nullptr : &filter);
                if (cfg.retrieval.dedupe) matches = docpipe::dedupe_by_text(matches);
                nlohmann::ordered_json out;
                out["query"] = query_text;
                out["matches"] = nlohmann::ordered_json::array();
                for (const auto& m : matches) out["matches"].push_back(match_to_json(m));
                out["context"] =
                    docpipe::assemble_context(matches, cfg.retrieval.context_budget);
                std::cout << out.dump(2) << "\n";
                return kExitOk;
            }
            if (*index_stats) {
                auto index = docpipe::VectorIndex::load(cfg.index.path);
                auto stats = index.stats();
                nlohmann::ordered_json out;
                out["dimension"] = stats.dimension;
                out["total"] = stats.total;
                out["namespaces"] = nlohmann::ordered_json::object();
                for (const auto& [name, count] : stats.namespace_counts) {
                    out["namespaces"][name] = count;
                }
                std::cout << out.dump(2) << "\n";
                return kExitOk;
            }
            if (*index_delete) {
                auto index = docpipe::VectorIndex::load(cfg.index.path);
                std::size_t removed = index.remove(delete_ids, cfg.index.ns);
                index.save(cfg.index.path);
                log_line("info", "deleted " + std::to_string(removed) + " records");
                return kExitOk;
            }
        }

        if (*cmd_pipeline) {
            std::vector<std::filesystem::path> inputs(pipeline_inputs.begin(),
                                                      pipeline_inputs.end());
            auto outcome = docpipe::run_pipeline(inputs, cfg, pipeline_out_dir);
            log_line("info", "pipeline done: " + std::to_string(outcome.documents) +
                                 " documents, " + std::to_string(outcome.elements) +
                                 " elements, " + std::to_string(outcome.chunks) + " chunks, " +
                                 std::to_string(outcome.upserted) + " records upserted into " +
                                 outcome.index_path.string());
            return kExitOk;
        }
    } catch (const docpipe::ConfigError& e) {
        log_line("error", e.what());
        return kExitConfigError;
    } catch (const docpipe::TransportError& e) {
        log_line("error", e.what());
        return kExitRemoteError;
    } catch (const docpipe::VisionUnavailableError& e) {
        log_line("error", e.what());
        return kExitRemoteError;
    } catch (const docpipe::Error& e) {
        log_line("error", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        log_line("error", e.what());
        return kExitInputError;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
