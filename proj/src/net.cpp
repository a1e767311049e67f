#include "docpipe/net.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <random>
#include <thread>

#include "base64.hpp"
#include "docpipe/errors.hpp"

namespace docpipe {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // /v1/...
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint must be an absolute http(s) URL: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
    return status == 429 || status >= 500;
}

// Exponential backoff with jitter. Only reached on failures, so the
// non-deterministic sleep never affects results.
void backoff_sleep(int attempt, int base_ms) {
    static thread_local std::mt19937 rng(std::random_device{}());
    std::uniform_int_distribution<int> jitter(0, base_ms / 2 + 1);
    std::this_thread::sleep_for(
        std::chrono::milliseconds((base_ms << attempt) + jitter(rng)));
}

// POSTs JSON with retries; returns the response body on 2xx.
template <typename MakeError>
std::string post_json(const ServiceOptions& options, const std::string& body,
                      MakeError make_error, const std::string& path_suffix = "") {
    SplitUrl url = split_url(options.endpoint);
    std::string path = url.path;
    if (!path_suffix.empty()) {
        if (path == "/") path.clear();
        path += path_suffix;
    }
    std::string last_failure;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        if (attempt > 0) backoff_sleep(attempt - 1, options.backoff_ms);

        httplib::Client client(url.origin);
        client.set_connection_timeout(options.timeout_seconds, 0);
        client.set_read_timeout(options.timeout_seconds, 0);
        client.set_write_timeout(options.timeout_seconds, 0);
        httplib::Headers headers;
        if (!options.api_key.empty()) {
            if (options.auth == ServiceOptions::Auth::ApiKeyHeader) {
                headers.emplace("Api-Key", options.api_key);
            } else {
                headers.emplace("Authorization", "Bearer " + options.api_key);
            }
        }

        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_failure = "no response from " + url.origin + ": " +
                           httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_failure = "status " + std::to_string(res->status) + " from " + options.endpoint;
        if (!retryable_status(res->status)) break;
    }
    throw make_error(last_failure);
}

} // namespace

HttpEmbeddingClient::HttpEmbeddingClient(ServiceOptions options, int dimension)
    : options_(std::move(options)), dimension_(dimension) {}

std::vector<EmbeddingVector> HttpEmbeddingClient::embed_batch(
    const std::vector<std::string>& texts) {
    nlohmann::json request;
    request["model"] = options_.model;
    request["input"] = texts;

    std::string body = post_json(options_, request.dump(),
                                 [](const std::string& d) { return TransportError(d); });

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw TransportError(std::string("unparseable embedding response: ") + e.what());
    }
    if (!response.contains("data") || !response["data"].is_array()) {
        throw TransportError("embedding response has no data array");
    }

    std::vector<EmbeddingVector> out(texts.size());
    std::vector<bool> seen(texts.size(), false);
    for (const auto& entry : response["data"]) {
        if (!entry.contains("index") || !entry.contains("embedding")) {
            throw TransportError("embedding response entry missing index/embedding");
        }
        auto idx = entry["index"].get<std::size_t>();
        if (idx >= out.size()) throw TransportError("embedding response index out of range");
        out[idx] = entry["embedding"].get<EmbeddingVector>();
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) throw TransportError("embedding response missing entry for input " +
                                           std::to_string(i));
    }
    return out;
}

HttpVisionClient::HttpVisionClient(ServiceOptions options) : options_(std::move(options)) {}

std::string HttpVisionClient::describe(std::span<const std::uint8_t> image_bytes,
                                       const std::string& content_type,
                                       const std::string& prompt) {
    nlohmann::json request;
    request["model"] = options_.model;
    request["prompt"] = prompt;
    request["image_base64"] = b64::encode(image_bytes.data(), image_bytes.size());
    request["media_type"] = content_type;

    std::string body = post_json(options_, request.dump(), [](const std::string& d) {
        return VisionUnavailableError(d);
    });

    try {
        nlohmann::json response = nlohmann::json::parse(body);
        if (response.contains("text") && response["text"].is_string()) {
            return response["text"].get<std::string>();
        }
    } catch (const nlohmann::json::parse_error&) {
        // fall through
    }
    throw VisionUnavailableError("vision response has no text field");
}

std::string UnavailableVisionClient::describe(std::span<const std::uint8_t>, const std::string&,
                                              const std::string&) {
    throw VisionUnavailableError("no vision service configured");
}

RemoteVectorIndexClient::RemoteVectorIndexClient(ServiceOptions options)
    : options_(std::move(options)) {
    options_.auth = ServiceOptions::Auth::ApiKeyHeader;
}

std::size_t RemoteVectorIndexClient::upsert(const std::vector<IndexRecord>& records,
                                            const std::string& ns) {
    nlohmann::ordered_json request;
    request["vectors"] = nlohmann::ordered_json::array();
    for (const IndexRecord& rec : records) {
        nlohmann::ordered_json entry;
        entry["id"] = rec.id;
        entry["values"] = rec.vector;
        entry["metadata"] = metadata_to_json(rec.metadata);
        request["vectors"].push_back(std::move(entry));
    }
    request["namespace"] = ns;

    std::string body = post_json(
        options_, request.dump(), [](const std::string& d) { return TransportError(d); },
        "/vectors/upsert");
    try {
        nlohmann::json response = nlohmann::json::parse(body);
        if (response.contains("upsertedCount")) {
            return response["upsertedCount"].get<std::size_t>();
        }
    } catch (const nlohmann::json::parse_error&) {
        // fall through
    }
    throw TransportError("upsert response has no upsertedCount");
}

std::vector<ScoredMatch> RemoteVectorIndexClient::query(const EmbeddingVector& vector, int top_k,
                                                        const std::string& ns,
                                                        const Metadata* filter) {
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    nlohmann::ordered_json request;
    request["vector"] = vector;
    request["topK"] = top_k;
    request["namespace"] = ns;
    if (filter) request["filter"] = metadata_to_json(*filter);
    request["includeMetadata"] = true;

    std::string body = post_json(
        options_, request.dump(), [](const std::string& d) { return TransportError(d); },
        "/query");
    try {
        nlohmann::ordered_json response = nlohmann::ordered_json::parse(body);
        if (response.contains("matches") && response["matches"].is_array()) {
            std::vector<ScoredMatch> out;
            for (const auto& entry : response["matches"]) {
                ScoredMatch match;
                match.id = entry.at("id").get<std::string>();
                match.score = entry.at("score").get<double>();
                if (entry.contains("metadata") && entry["metadata"].is_object()) {
                    match.metadata = metadata_from_json(entry["metadata"]);
                }
                out.push_back(std::move(match));
            }
            return out;
        }
    } catch (const nlohmann::json::exception&) {
        // fall through
    }
    throw TransportError("query response has no matches array");
}

} // namespace docpipe
