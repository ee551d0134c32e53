#pragma once
// Diagnostic metric suite: PVR, strict F1, soft F1 with optimal one-to-one
// matching, latent/surface decomposition, Shannon entropy normalization and
// the latent-surface gap.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgp/backends.hpp"
#include "sgp/graph.hpp"

namespace sgp {

class SchemaDef;
struct Corpus;

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// F1 = 2PR/(P+R) when P+R > 0, else 0.
PRF make_prf(double precision, double recall);

// Exact set matching over canonical triplet texts. Empty side => 0.
PRF strict_prf(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold);

// Embedding-similarity matching: cosine clamped to [0,1], entries below tau
// zeroed, maximum-weight one-to-one assignment; precision/recall are the
// matched similarity mass over |pred| and |gold|.
PRF soft_prf(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold,
             Embedder& embedder, double tau);

// Fraction of predicted triplets whose predicate is unknown or whose
// (subject kind, object kind) pair violates the arity map. 0 when empty.
double pvr(const std::vector<Triplet>& pred, const SchemaDef& schema);

// H = -sum p_i log2 p_i in bits. Throws std::invalid_argument when the total
// count is zero.
double shannon_entropy(const std::map<std::string, size_t>& counts);

// f1 * (h_cat / h_surf); nullopt marks the h_surf == 0 undefined case.
std::optional<double> entropy_normalized_f1(double f1, double h_cat, double h_surf);

// Positive values mean surface extraction outperforms latent inference.
double latent_surface_gap(double surface_f1, double latent_f1);

enum class EntropyMode { pooled, per_kind, uniform };

std::string_view to_string(EntropyMode m);
std::optional<EntropyMode> entropy_mode_from_string(std::string_view s);

// Corpus-level entropy baselines for F1* normalization. Values are keyed by
// kind:name so shared names across kinds stay distinct.
struct EntropyContext {
    double h_latent_cat = 0.0;
    double h_surface_cat = 0.0;
    double h_surface_base = 0.0;

    // Empirical object-value distribution over the corpus gold graphs.
    static EntropyContext from_corpus(const Corpus& corpus, const SchemaDef& schema,
                                      EntropyMode mode = EntropyMode::pooled);
    // Uniform over the schema vocabularies (the 8-vs-106 setup by default).
    static EntropyContext uniform(const SchemaDef& schema);
};

struct MetricRecord {
    PRF strict;
    PRF soft;
    PRF soft_latent;
    PRF soft_surface;
    double pvr = 0.0;
    double gap_ls = 0.0;  // soft_surface.f1 - soft_latent.f1, exact
    std::optional<double> latent_f1_norm;
    std::optional<double> surface_f1_norm;
    std::optional<double> gap_norm;
};

MetricRecord score_instance(const std::vector<Triplet>& pred,
                            const std::vector<Triplet>& gold, const SchemaDef& schema,
                            Embedder& embedder, double tau,
                            const EntropyContext& entropy);

// Maximum-weight one-to-one assignment on a rectangular non-negative matrix
// (rows = pred, cols = gold). Exposed so tests can pin it against brute-force
// permutation enumeration.
struct Assignment {
    std::vector<int> row_to_col;  // -1 = unmatched
    double mass = 0.0;
};

Assignment max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace sgp
