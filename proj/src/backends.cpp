#include "sgp/backends.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sgp/ontology.hpp"
#include "sgp/rng.hpp"

namespace sgp {

std::string render_triplet_lines(std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end());
    triplets.erase(std::unique(triplets.begin(), triplets.end()), triplets.end());
    std::string out;
    for (const auto& t : triplets) {
        out += t.subject.kind + ":" + t.subject.name + " | " + t.predicate + " | " +
               t.object.kind + ":" + t.object.name + "\n";
    }
    return out;
}

HashingEmbedder::HashingEmbedder(size_t dimension, uint64_t seed)
    : dimension_(dimension), seed_(seed) {}

std::vector<std::vector<double>> HashingEmbedder::embed(
    const std::vector<std::string>& texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<double> vec(dimension_, 0.0);
        for (const auto& token : tokenize(canonical(text))) {
            const uint64_t h = splitmix64(fnv1a64(token) ^ seed_);
            const size_t bucket = static_cast<size_t>(h % dimension_);
            vec[bucket] += (h >> 63) ? 1.0 : -1.0;
        }
        double norm = 0;
        for (double v : vec) norm += v * v;
        if (norm > 0) {
            norm = std::sqrt(norm);
            for (double& v : vec) v /= norm;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

BackendFingerprint HashingEmbedder::fingerprint() const {
    return {"embedding", "offline", "feature-hash",
            hex64(fnv1a64(std::to_string(dimension_) + ":" + std::to_string(seed_)))};
}

std::vector<std::vector<double>> IndicatorEmbedder::embed(
    const std::vector<std::string>& texts) {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<size_t> ids;
    ids.reserve(texts.size());
    for (const auto& text : texts) {
        auto it = ordinals_.try_emplace(text, ordinals_.size()).first;
        ids.push_back(it->second);
    }
    const size_t dim = ordinals_.size();
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (size_t id : ids) {
        std::vector<double> vec(dim, 0.0);
        vec[id] = 1.0;
        out.push_back(std::move(vec));
    }
    return out;
}

size_t IndicatorEmbedder::dimension() const {
    std::lock_guard<std::mutex> lock(mu_);
    return ordinals_.size();
}

BackendFingerprint IndicatorEmbedder::fingerprint() const {
    return {"embedding", "offline", "indicator", "0"};
}

OracleGenerator::OracleGenerator(const Corpus& corpus) : corpus_(&corpus) {}

std::string OracleGenerator::generate(const std::string&, const GenParams& params) {
    const Instance* inst = corpus_->find_instance(params.instance_id);
    if (inst == nullptr) {
        throw BackendError("oracle backend: unknown instance '" + params.instance_id + "'");
    }
    return render_triplet_lines(inst->gold.triplets);
}

BackendFingerprint OracleGenerator::fingerprint() const {
    return {"generation", "offline", "oracle", "0"};
}

NoisyOracleGenerator::NoisyOracleGenerator(const Corpus& corpus, const SchemaDef& schema,
                                           NoisyOracleConfig config)
    : corpus_(&corpus), schema_(&schema), config_(config) {}

namespace {

// Unique predicate guaranteed absent from the schema.
std::string invalid_predicate(const SchemaDef& schema, size_t counter) {
    std::string p = "confabulates_" + std::to_string(counter);
    while (schema.find_predicate(p) != nullptr) p += "_x";
    return p;
}

// Replace the object name with a different value from the same vocabulary;
// keeps the triplet schema-valid. Retries to keep the output a set.
bool corrupt_object(const SchemaDef& schema, Rng& rng, const std::set<Triplet>& taken,
                    Triplet& t) {
    const NodeKind* kind = schema.find_kind(t.object.kind);
    if (kind == nullptr || kind->vocabulary.size() < 2) return false;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::string& name = kind->vocabulary[rng.bounded(kind->vocabulary.size())];
        if (name == t.object.name) continue;
        Triplet candidate(t.subject, t.predicate, Node(t.object.kind, name));
        if (taken.count(candidate)) continue;
        t = candidate;
        return true;
    }
    return false;
}

}  // namespace

std::string NoisyOracleGenerator::generate(const std::string&, const GenParams& params) {
    const Instance* inst = corpus_->find_instance(params.instance_id);
    if (inst == nullptr) {
        throw BackendError("noisy-oracle backend: unknown instance '" + params.instance_id +
                           "'");
    }
    std::vector<Triplet> gold(inst->gold.triplets);
    std::sort(gold.begin(), gold.end());
    gold.erase(std::unique(gold.begin(), gold.end()), gold.end());

    Rng rng(derive_seed({config_.seed, params.seed, fnv1a64(params.instance_id)}));
    NoisyOracleStats st;
    st.gold_total = gold.size();

    std::vector<Triplet> survivors;
    for (const auto& t : gold) {
        const bool latent = is_latent(*schema_, t);
        (latent ? st.gold_latent : st.gold_surface)++;
        const double drop = latent ? config_.drop_rate_latent : config_.drop_rate_surface;
        if (rng.bernoulli(drop)) {
            (latent ? st.dropped_latent : st.dropped_surface)++;
            continue;
        }
        survivors.push_back(t);
    }

    std::vector<Triplet> out;
    std::set<Triplet> taken(survivors.begin(), survivors.end());
    if (config_.exact_invalid_denom > 0) {
        // Count-based mode: trim the survivors so that exactly
        // numer/denom of the emitted lines are invalid.
        const int numer = config_.exact_invalid_numer;
        const int denom = config_.exact_invalid_denom;
        if (numer < 0 || numer >= denom) {
            throw BackendError("noisy-oracle: exact invalid fraction must be in [0,1)");
        }
        const size_t valid_per_block = static_cast<size_t>(denom - numer);
        const size_t blocks = survivors.size() / valid_per_block;
        if (blocks == 0) {
            throw BackendError("noisy-oracle: too few gold triplets for exact fraction " +
                               std::to_string(numer) + "/" + std::to_string(denom));
        }
        survivors.resize(blocks * valid_per_block);
        out = survivors;
        const size_t invalid = blocks * static_cast<size_t>(numer);
        for (size_t i = 0; i < invalid; ++i) {
            Triplet t = survivors[i % survivors.size()];
            out.emplace_back(t.subject, invalid_predicate(*schema_, i), t.object);
        }
        st.invalid_emitted = invalid;
    } else {
        size_t hallucination_counter = 0;
        for (auto& t : survivors) {
            if (rng.bernoulli(config_.corrupt_rate) && corrupt_object(*schema_, rng, taken, t)) {
                ++st.corrupted;
                taken.insert(t);
            }
            out.push_back(t);
            if (rng.bernoulli(config_.hallucinate_rate)) {
                out.emplace_back(t.subject,
                                 invalid_predicate(*schema_, hallucination_counter++),
                                 t.object);
                ++st.hallucinated;
                ++st.invalid_emitted;
            }
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    st.emitted_total = out.size();
    {
        std::lock_guard<std::mutex> lock(mu_);
        stats_[params.instance_id] = st;
    }
    return render_triplet_lines(out);
}

BackendFingerprint NoisyOracleGenerator::fingerprint() const {
    std::ostringstream cfg;
    cfg << config_.drop_rate_surface << ":" << config_.drop_rate_latent << ":"
        << config_.corrupt_rate << ":" << config_.hallucinate_rate << ":" << config_.seed
        << ":" << config_.exact_invalid_numer << "/" << config_.exact_invalid_denom;
    return {"generation", "offline", "noisy-oracle", hex64(fnv1a64(cfg.str()))};
}

NoisyOracleStats NoisyOracleGenerator::total_stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    NoisyOracleStats total;
    for (const auto& [id, st] : stats_) {
        total.gold_total += st.gold_total;
        total.gold_latent += st.gold_latent;
        total.gold_surface += st.gold_surface;
        total.dropped_latent += st.dropped_latent;
        total.dropped_surface += st.dropped_surface;
        total.corrupted += st.corrupted;
        total.hallucinated += st.hallucinated;
        total.invalid_emitted += st.invalid_emitted;
        total.emitted_total += st.emitted_total;
    }
    return total;
}

}  // namespace sgp
