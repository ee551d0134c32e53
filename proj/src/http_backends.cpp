#include "sgp/http_backends.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sgp/rng.hpp"
#include "sgp/text.hpp"

namespace sgp {

using nlohmann::json;

namespace fs = std::filesystem;

std::string ResponseCache::entry_path(const BackendFingerprint& fp,
                                      const std::string& input_hash) const {
    return root_ + "/" + fp.capability + "/" + fp.provider + "-" + fp.model + "-" +
           fp.config_hash + "/" + input_hash;
}

std::optional<std::string> ResponseCache::get(const BackendFingerprint& fp,
                                              const std::string& input_hash) const {
    std::ifstream in(entry_path(fp, input_hash), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ResponseCache::put(const BackendFingerprint& fp, const std::string& input_hash,
                        const std::string& value) {
    std::lock_guard<std::mutex> lock(mu_);
    const fs::path path = entry_path(fp, input_hash);
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << value;
    }
    fs::rename(tmp, path);
}

namespace {

std::string resolve_credential(const HttpBackendConfig& config) {
    if (config.api_key_env.empty()) return "";
    const char* value = std::getenv(config.api_key_env.c_str());
    if (value == nullptr || *value == '\0') {
        throw BackendError("credential environment variable '" + config.api_key_env +
                           "' is not set");
    }
    return value;
}

// Request log: input hashes only unless full payloads are explicitly enabled.
void log_request(const HttpBackendConfig& config, const std::string& capability,
                 const std::string& input_hash, const std::string& status,
                 const std::string& payload) {
    if (config.log_file.empty()) return;
    static std::mutex log_mu;
    std::lock_guard<std::mutex> lock(log_mu);
    std::ofstream out(config.log_file, std::ios::app);
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    out << now << " capability=" << capability << " model=" << config.model
        << " input_hash=" << input_hash << " status=" << status;
    if (config.log_full_payloads) out << " payload=" << json(payload).dump();
    out << "\n";
}

// POST with transient-failure retries (transport errors and 5xx); 4xx and
// shape failures surface immediately.
json post_json(const HttpBackendConfig& config, const std::string& api_key,
               const json& body) {
    std::string last_error;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config.backoff_ms * (1 << (attempt - 1))));
        }
        httplib::Client client(config.base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.insert({"Authorization", "Bearer " + api_key});
        auto res = client.Post(config.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw BackendError("authorization failure (" + std::to_string(res->status) + ")");
        }
        if (res->status != 200) {
            throw BackendError("request failed with status " + std::to_string(res->status));
        }
        json doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw BackendError("response is not a JSON object");
        }
        return doc;
    }
    throw BackendError("request failed after " + std::to_string(config.max_retries + 1) +
                       " attempts: " + last_error);
}

}  // namespace

HttpGenerator::HttpGenerator(HttpBackendConfig config)
    : config_(std::move(config)), api_key_(resolve_credential(config_)) {
    if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

BackendFingerprint HttpGenerator::fingerprint() const {
    return {"generation", "http", config_.model,
            hex64(fnv1a64(config_.base_url + config_.path + ":" +
                          std::to_string(config_.temperature)))};
}

std::string HttpGenerator::generate(const std::string& prompt, const GenParams& params) {
    if (prompt.empty()) throw BackendError("generate: empty prompt");
    const std::string input_hash =
        hex64(fnv1a64(prompt + '\x1f' + std::to_string(params.seed)));
    if (cache_) {
        if (auto hit = cache_->get(fingerprint(), input_hash)) {
            log_request(config_, "generation", input_hash, "cache", prompt);
            return *hit;
        }
    }
    json body = {{"model", config_.model},
                 {"input", prompt},
                 {"params", {{"temperature", config_.temperature}, {"seed", params.seed}}}};
    json doc;
    try {
        doc = post_json(config_, api_key_, body);
    } catch (const BackendError&) {
        log_request(config_, "generation", input_hash, "error", prompt);
        throw;
    }
    if (!doc.contains("output") || !doc.at("output").is_string()) {
        log_request(config_, "generation", input_hash, "bad_shape", prompt);
        throw BackendError("response missing string field 'output'");
    }
    std::string output = doc.at("output").get<std::string>();
    log_request(config_, "generation", input_hash, "ok", prompt);
    if (cache_) cache_->put(fingerprint(), input_hash, output);
    return output;
}

HttpEmbedder::HttpEmbedder(HttpBackendConfig config)
    : config_(std::move(config)), api_key_(resolve_credential(config_)) {
    if (config_.embedding_dimension == 0) {
        throw BackendError("http embedder: embedding_dimension is required");
    }
    if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

BackendFingerprint HttpEmbedder::fingerprint() const {
    return {"embedding", "http", config_.model,
            hex64(fnv1a64(config_.base_url + config_.path + ":" +
                          std::to_string(config_.embedding_dimension)))};
}

std::vector<std::vector<double>> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw BackendError("embed: empty batch");
    uint64_t h = kFnvOffset;
    for (const auto& t : texts) h = fnv1a64(t, splitmix64(h));
    const std::string input_hash = hex64(h);

    json doc;
    bool from_cache = false;
    if (cache_) {
        if (auto hit = cache_->get(fingerprint(), input_hash)) {
            doc = json::parse(*hit, nullptr, false);
            from_cache = !doc.is_discarded();
        }
    }
    if (!from_cache) {
        json body = {{"model", config_.model}, {"inputs", texts}};
        doc = post_json(config_, api_key_, body);
        if (cache_) cache_->put(fingerprint(), input_hash, doc.dump());
    }
    log_request(config_, "embedding", input_hash, from_cache ? "cache" : "ok",
                texts.front());
    if (!doc.contains("embeddings") || !doc.at("embeddings").is_array()) {
        throw BackendError("response missing array field 'embeddings'");
    }
    std::vector<std::vector<double>> out;
    for (const auto& jv : doc.at("embeddings")) {
        auto vec = jv.get<std::vector<double>>();
        if (vec.size() != config_.embedding_dimension) {
            throw BackendError("embedding dimension mismatch: got " +
                               std::to_string(vec.size()) + ", declared " +
                               std::to_string(config_.embedding_dimension));
        }
        out.push_back(std::move(vec));
    }
    if (out.size() != texts.size()) {
        throw BackendError("embedding count mismatch: got " + std::to_string(out.size()) +
                           " for " + std::to_string(texts.size()) + " inputs");
    }
    return out;
}

}  // namespace sgp
