#include "sgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "sgp/corpus.hpp"
#include "sgp/ontology.hpp"

namespace sgp {

namespace {

// Distinct triplets sorted by canonical text: set semantics plus a fixed
// order so assignment tie-breaks are reproducible.
std::vector<Triplet> canonical_set(const std::vector<Triplet>& ts) {
    std::vector<Triplet> out(ts.begin(), ts.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::sqrt(na) * std::sqrt(nb);
    return denom > 0 ? dot / denom : 0.0;
}

}  // namespace

PRF make_prf(double precision, double recall) {
    PRF out;
    out.precision = precision;
    out.recall = recall;
    out.f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    return out;
}

PRF strict_prf(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold) {
    const auto p = canonical_set(pred);
    const auto g = canonical_set(gold);
    if (p.empty() || g.empty()) return make_prf(0.0, 0.0);
    size_t tp = 0;
    std::set<Triplet> gold_set(g.begin(), g.end());
    for (const auto& t : p) tp += gold_set.count(t);
    return make_prf(static_cast<double>(tp) / static_cast<double>(p.size()),
                    static_cast<double>(tp) / static_cast<double>(g.size()));
}

PRF soft_prf(const std::vector<Triplet>& pred, const std::vector<Triplet>& gold,
             Embedder& embedder, double tau) {
    const auto p = canonical_set(pred);
    const auto g = canonical_set(gold);
    if (p.empty() || g.empty()) return make_prf(0.0, 0.0);

    // One batch so embedders with per-batch vector spaces stay consistent.
    std::vector<std::string> texts;
    texts.reserve(p.size() + g.size());
    for (const auto& t : p) texts.push_back(canonical_triplet_text(t));
    for (const auto& t : g) texts.push_back(canonical_triplet_text(t));
    const auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) {
        throw BackendError("embedder returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(texts.size()) + " texts");
    }

    std::vector<std::vector<double>> sim(p.size(), std::vector<double>(g.size(), 0.0));
    for (size_t i = 0; i < p.size(); ++i) {
        for (size_t j = 0; j < g.size(); ++j) {
            double s = std::clamp(cosine(vectors[i], vectors[p.size() + j]), 0.0, 1.0);
            sim[i][j] = s < tau ? 0.0 : s;
        }
    }
    const Assignment a = max_weight_assignment(sim);
    return make_prf(a.mass / static_cast<double>(p.size()),
                    a.mass / static_cast<double>(g.size()));
}

double pvr(const std::vector<Triplet>& pred, const SchemaDef& schema) {
    const auto p = canonical_set(pred);
    if (p.empty()) return 0.0;
    size_t invalid = 0;
    for (const auto& t : p) {
        if (schema.find_predicate(t.predicate) == nullptr ||
            !schema.arity_allows(t.predicate, t.subject.kind, t.object.kind)) {
            ++invalid;
        }
    }
    return static_cast<double>(invalid) / static_cast<double>(p.size());
}

double shannon_entropy(const std::map<std::string, size_t>& counts) {
    double total = 0;
    for (const auto& [value, count] : counts) total += static_cast<double>(count);
    if (total <= 0) throw std::invalid_argument("shannon_entropy: empty distribution");
    double h = 0;
    for (const auto& [value, count] : counts) {
        if (count == 0) continue;
        const double pr = static_cast<double>(count) / total;
        h -= pr * std::log2(pr);
    }
    return h;
}

std::optional<double> entropy_normalized_f1(double f1, double h_cat, double h_surf) {
    if (h_surf <= 0) return std::nullopt;
    return f1 * (h_cat / h_surf);
}

double latent_surface_gap(double surface_f1, double latent_f1) {
    return surface_f1 - latent_f1;
}

std::string_view to_string(EntropyMode m) {
    switch (m) {
        case EntropyMode::pooled: return "pooled";
        case EntropyMode::per_kind: return "per_kind";
        case EntropyMode::uniform: return "uniform";
    }
    return "pooled";
}

std::optional<EntropyMode> entropy_mode_from_string(std::string_view s) {
    if (s == "pooled") return EntropyMode::pooled;
    if (s == "per_kind") return EntropyMode::per_kind;
    if (s == "uniform") return EntropyMode::uniform;
    return std::nullopt;
}

namespace {

double safe_entropy(const std::map<std::string, size_t>& counts) {
    return counts.empty() ? 0.0 : shannon_entropy(counts);
}

// Mean of per-kind entropies; counts keyed kind:name.
double per_kind_entropy(const std::map<std::string, size_t>& counts) {
    std::map<std::string, std::map<std::string, size_t>> by_kind;
    for (const auto& [key, count] : counts) {
        const auto colon = key.find(':');
        by_kind[key.substr(0, colon)][key] += count;
    }
    if (by_kind.empty()) return 0.0;
    double sum = 0;
    for (const auto& [kind, kind_counts] : by_kind) sum += safe_entropy(kind_counts);
    return sum / static_cast<double>(by_kind.size());
}

}  // namespace

EntropyContext EntropyContext::from_corpus(const Corpus& corpus, const SchemaDef& schema,
                                           EntropyMode mode) {
    if (mode == EntropyMode::uniform) return uniform(schema);
    std::map<std::string, size_t> latent_counts;
    std::map<std::string, size_t> surface_counts;
    for (const auto& inst : corpus.instances) {
        for (const auto& t : inst.gold.triplets) {
            auto& counts = is_latent(schema, t) ? latent_counts : surface_counts;
            ++counts[t.object.kind + ":" + t.object.name];
        }
    }
    EntropyContext ctx;
    ctx.h_surface_base = safe_entropy(surface_counts);
    if (mode == EntropyMode::pooled) {
        ctx.h_latent_cat = safe_entropy(latent_counts);
        ctx.h_surface_cat = ctx.h_surface_base;
    } else {
        ctx.h_latent_cat = per_kind_entropy(latent_counts);
        ctx.h_surface_cat = per_kind_entropy(surface_counts);
    }
    return ctx;
}

EntropyContext EntropyContext::uniform(const SchemaDef& schema) {
    std::map<std::string, size_t> latent_counts;
    std::map<std::string, size_t> surface_counts;
    for (const auto& kind : schema.kinds()) {
        auto& counts =
            kind.stratum == Stratum::psychological ? latent_counts : surface_counts;
        for (const auto& name : kind.vocabulary) counts[kind.id + ":" + name] = 1;
    }
    EntropyContext ctx;
    ctx.h_latent_cat = safe_entropy(latent_counts);
    ctx.h_surface_cat = safe_entropy(surface_counts);
    ctx.h_surface_base = ctx.h_surface_cat;
    return ctx;
}

MetricRecord score_instance(const std::vector<Triplet>& pred,
                            const std::vector<Triplet>& gold, const SchemaDef& schema,
                            Embedder& embedder, double tau,
                            const EntropyContext& entropy) {
    MetricRecord rec;
    rec.strict = strict_prf(pred, gold);
    rec.soft = soft_prf(pred, gold, embedder, tau);
    const auto pred_split = partition_latent_surface(schema, pred);
    const auto gold_split = partition_latent_surface(schema, gold);
    rec.soft_latent = soft_prf(pred_split.latent, gold_split.latent, embedder, tau);
    rec.soft_surface = soft_prf(pred_split.surface, gold_split.surface, embedder, tau);
    rec.pvr = pvr(pred, schema);
    rec.gap_ls = latent_surface_gap(rec.soft_surface.f1, rec.soft_latent.f1);
    rec.latent_f1_norm =
        entropy_normalized_f1(rec.soft_latent.f1, entropy.h_latent_cat, entropy.h_surface_base);
    rec.surface_f1_norm = entropy_normalized_f1(rec.soft_surface.f1, entropy.h_surface_cat,
                                                entropy.h_surface_base);
    if (rec.latent_f1_norm && rec.surface_f1_norm) {
        rec.gap_norm = *rec.surface_f1_norm - *rec.latent_f1_norm;
    }
    return rec;
}

Assignment max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const size_t rows = weights.size();
    const size_t cols = rows == 0 ? 0 : weights[0].size();
    for (const auto& row : weights) {
        if (row.size() != cols) {
            throw std::invalid_argument("max_weight_assignment: ragged matrix");
        }
    }
    Assignment out;
    out.row_to_col.assign(rows, -1);
    if (rows == 0 || cols == 0) return out;

    // Kuhn-Munkres with potentials on the square padding; costs are negated
    // weights so the minimum-cost perfect matching maximizes mass.
    const size_t n = std::max(rows, cols);
    const double inf = std::numeric_limits<double>::infinity();
    auto cost = [&](size_t i, size_t j) {
        return (i < rows && j < cols) ? -weights[i][j] : 0.0;
    };
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<size_t> match(n + 1, 0), way(n + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        match[0] = i;
        size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const size_t i0 = match[j0];
            size_t j1 = 0;
            double delta = inf;
            for (size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (size_t j = 1; j <= n; ++j) {
        const size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) {
            out.row_to_col[i - 1] = static_cast<int>(j - 1);
        }
    }
    // Mass summed in row order so equal assignments sum bit-identically.
    for (size_t i = 0; i < rows; ++i) {
        if (out.row_to_col[i] >= 0) {
            out.mass += weights[i][static_cast<size_t>(out.row_to_col[i])];
        }
    }
    return out;
}

}  // namespace sgp
