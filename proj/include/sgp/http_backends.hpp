#pragma once
// Live-service backends speaking a minimal JSON-over-HTTP contract:
//   POST <path>  {"model": ..., "input": ...}        -> {"output": "..."}
//   POST <path>  {"model": ..., "inputs": [...]}     -> {"embeddings": [[...]]}
// Credentials come from an environment variable named in the config, never
// from files. Responses are cached on disk keyed by (fingerprint, input hash).

#include <optional>
#include <string>
#include <vector>

#include "sgp/backends.hpp"

namespace sgp {

struct HttpBackendConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8089
    std::string path;      // e.g. /v1/generate
    std::string model;
    std::string api_key_env;  // empty = no credential required
    int max_retries = 3;
    int backoff_ms = 250;
    double temperature = 0.0;
    size_t embedding_dimension = 0;  // embedder only
    std::string cache_dir;           // empty = caching disabled
    std::string log_file;            // empty = no request log
    bool log_full_payloads = false;  // default logs input hashes only
};

// On-disk response cache: cache/<capability>/<fingerprint>/<input-hash>.
// Concurrent readers, serialized atomic writes.
class ResponseCache {
public:
    explicit ResponseCache(std::string root) : root_(std::move(root)) {}

    std::optional<std::string> get(const BackendFingerprint& fp,
                                   const std::string& input_hash) const;
    void put(const BackendFingerprint& fp, const std::string& input_hash,
             const std::string& value);

private:
    std::string entry_path(const BackendFingerprint& fp, const std::string& input_hash) const;

    std::string root_;
    mutable std::mutex mu_;
};

class HttpGenerator : public TextGenerator {
public:
    // Throws BackendError when the named credential variable is unset.
    explicit HttpGenerator(HttpBackendConfig config);

    std::string generate(const std::string& prompt, const GenParams& params) override;
    BackendFingerprint fingerprint() const override;
    bool deterministic() const override { return false; }
    bool seed_sensitive() const override { return true; }

private:
    HttpBackendConfig config_;
    std::string api_key_;
    std::optional<ResponseCache> cache_;
};

class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpBackendConfig config);

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    size_t dimension() const override { return config_.embedding_dimension; }
    BackendFingerprint fingerprint() const override;
    bool deterministic() const override { return false; }

private:
    HttpBackendConfig config_;
    std::string api_key_;
    std::optional<ResponseCache> cache_;
};

}  // namespace sgp
