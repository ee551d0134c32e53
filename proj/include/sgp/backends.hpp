#pragma once
// Pluggable capability interfaces (text generation, embedding) and the
// offline implementations used for tests and default runs. Live HTTP-backed
// implementations live in http_backends.hpp.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/corpus.hpp"
#include "sgp/graph.hpp"

namespace sgp {

class SchemaDef;

struct BackendFingerprint {
    std::string capability;  // generation | embedding | encoding
    std::string provider;
    std::string model;
    std::string config_hash;

    std::string str() const {
        return capability + ":" + provider + ":" + model + ":" + config_hash;
    }
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-call parameters. instance_id and seed are opaque routing tags: only the
// oracle family resolves the id against its configured corpus, live backends
// see nothing but the prompt.
struct GenParams {
    std::string instance_id;
    uint64_t seed = 0;
    double temperature = 0.0;
};

class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual std::string generate(const std::string& prompt, const GenParams& params) = 0;
    virtual BackendFingerprint fingerprint() const = 0;
    virtual bool deterministic() const { return true; }
    // True when output varies with params.seed; such backends produce real
    // run-to-run variation and must not be short-circuited to one run.
    virtual bool seed_sensitive() const { return false; }
};

class Embedder {
public:
    virtual ~Embedder() = default;
    // One vector per input, batch order preserved.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
    virtual size_t dimension() const = 0;
    virtual BackendFingerprint fingerprint() const = 0;
    virtual bool deterministic() const { return true; }
};

// Feature-hashed token counts over canonical text, L2-normalized. The
// mandatory offline embedder: fixed dimension, seeded hash, bit-deterministic.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(size_t dimension = 512, uint64_t seed = 0x5367505f686173ULL);

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    size_t dimension() const override { return dimension_; }
    BackendFingerprint fingerprint() const override;

private:
    size_t dimension_;
    uint64_t seed_;
};

// Test-only embedder: cosine is 1 iff texts are equal, 0 otherwise
// (orthogonal one-hot per distinct text). Vectors are only comparable within
// one embed() batch; the dimension grows with the number of distinct texts.
class IndicatorEmbedder : public Embedder {
public:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    size_t dimension() const override;
    BackendFingerprint fingerprint() const override;

private:
    mutable std::mutex mu_;
    std::map<std::string, size_t> ordinals_;
};

// Renders the gold graph of the queried instance in the output grammar.
class OracleGenerator : public TextGenerator {
public:
    explicit OracleGenerator(const Corpus& corpus);

    std::string generate(const std::string& prompt, const GenParams& params) override;
    BackendFingerprint fingerprint() const override;

private:
    const Corpus* corpus_;
};

struct NoisyOracleConfig {
    double drop_rate_surface = 0.0;
    double drop_rate_latent = 0.0;
    double corrupt_rate = 0.0;
    double hallucinate_rate = 0.0;
    uint64_t seed = 0;
    // Count-based exact-invalid mode: when denom > 0, each response is built
    // from the largest (post-drop) gold subset such that exactly numer/denom
    // of the output lines carry a schema-invalid predicate; corrupt_rate and
    // hallucinate_rate are ignored in this mode.
    int exact_invalid_numer = 0;
    int exact_invalid_denom = 0;
};

// Realized per-call event counts, logged so metric checks can compare against
// exact rates rather than expectations.
struct NoisyOracleStats {
    size_t gold_total = 0;
    size_t gold_latent = 0;
    size_t gold_surface = 0;
    size_t dropped_latent = 0;
    size_t dropped_surface = 0;
    size_t corrupted = 0;
    size_t hallucinated = 0;
    size_t invalid_emitted = 0;
    size_t emitted_total = 0;
};

// Degrades the gold graph with orthogonal, individually testable knobs:
// drop (recall damage, per stratum), corrupt (accuracy damage, stays
// schema-valid), hallucinate (PVR signal via unknown predicates).
class NoisyOracleGenerator : public TextGenerator {
public:
    NoisyOracleGenerator(const Corpus& corpus, const SchemaDef& schema,
                         NoisyOracleConfig config);

    std::string generate(const std::string& prompt, const GenParams& params) override;
    BackendFingerprint fingerprint() const override;
    bool seed_sensitive() const override { return true; }

    const std::map<std::string, NoisyOracleStats>& stats_log() const { return stats_; }
    NoisyOracleStats total_stats() const;

private:
    const Corpus* corpus_;
    const SchemaDef* schema_;
    NoisyOracleConfig config_;
    mutable std::mutex mu_;
    std::map<std::string, NoisyOracleStats> stats_;
};

// Renders triplets in the prediction output grammar, one per line, in
// canonical sorted order.
std::string render_triplet_lines(std::vector<Triplet> triplets);

}  // namespace sgp
