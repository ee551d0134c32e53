#pragma once
// Bundle embedding and exhaustive top-k cosine retrieval over the fold's
// retrieval split. No approximate structures: corpora here are small and
// determinism matters more than speed.

#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/backends.hpp"
#include "sgp/corpus.hpp"
#include "sgp/decompose.hpp"

namespace sgp {

struct EmbeddingIndex {
    struct Entry {
        std::string instance_id;
        std::vector<double> vec;
        double norm = 0.0;
    };
    std::vector<Entry> entries;
    size_t dimension = 0;
    std::string embedder_fingerprint;

    size_t size() const { return entries.size(); }
};

struct RetrievalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Embeds the flattened decomposed bundle text.
std::vector<double> embed_bundle(const ArtifactBundle& bundle, const EncoderSet& encoders,
                                 Embedder& embedder);

// Index over (instance_id, bundle) pairs, in the given order.
EmbeddingIndex build_index(const std::vector<const Instance*>& instances,
                           const EncoderSet& encoders, Embedder& embedder);

// The k ids with highest cosine similarity, descending; ties broken by
// ascending instance_id; exclude_id (the query's own id) never returned.
std::vector<std::string> top_k(const std::vector<double>& query,
                               const EmbeddingIndex& index, size_t k,
                               const std::string& exclude_id = "");

// JSON cache keyed by the embedder fingerprint; load returns false (and
// leaves the index empty) when the file is missing or fingerprints mismatch.
void save_index(const EmbeddingIndex& index, const std::string& path);
bool load_index(EmbeddingIndex& index, const std::string& path,
                const std::string& expected_fingerprint);

}  // namespace sgp
