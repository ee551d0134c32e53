#include "sgp/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace sgp {

using nlohmann::json;

std::vector<double> embed_bundle(const ArtifactBundle& bundle, const EncoderSet& encoders,
                                 Embedder& embedder) {
    if (bundle.empty()) throw RetrievalError("embed_bundle: empty bundle");
    auto vectors = embedder.embed({decompose_and_flatten(bundle, encoders)});
    if (vectors.size() != 1) throw RetrievalError("embedder returned a bad batch size");
    return vectors[0];
}

EmbeddingIndex build_index(const std::vector<const Instance*>& instances,
                           const EncoderSet& encoders, Embedder& embedder) {
    EmbeddingIndex index;
    index.embedder_fingerprint = embedder.fingerprint().str();
    std::vector<std::string> texts;
    texts.reserve(instances.size());
    for (const Instance* inst : instances) {
        texts.push_back(decompose_and_flatten(inst->artifacts, encoders));
    }
    if (texts.empty()) return index;
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) {
        throw RetrievalError("embedder returned a bad batch size");
    }
    index.dimension = vectors.empty() ? 0 : vectors[0].size();
    for (size_t i = 0; i < instances.size(); ++i) {
        if (vectors[i].size() != index.dimension) {
            throw RetrievalError("embedder returned mixed dimensions");
        }
        double norm = 0;
        for (double x : vectors[i]) norm += x * x;
        index.entries.push_back(
            {instances[i]->instance_id, std::move(vectors[i]), std::sqrt(norm)});
    }
    return index;
}

std::vector<std::string> top_k(const std::vector<double>& query,
                               const EmbeddingIndex& index, size_t k,
                               const std::string& exclude_id) {
    size_t available = 0;
    for (const auto& e : index.entries) available += e.instance_id != exclude_id ? 1 : 0;
    if (k > available) {
        throw RetrievalError("top_k: k=" + std::to_string(k) + " exceeds index size " +
                             std::to_string(available));
    }
    double qnorm = 0;
    for (double x : query) qnorm += x * x;
    qnorm = std::sqrt(qnorm);

    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(index.entries.size());
    for (const auto& e : index.entries) {
        if (e.instance_id == exclude_id) continue;
        double dot = 0;
        for (size_t i = 0; i < query.size() && i < e.vec.size(); ++i) dot += query[i] * e.vec[i];
        const double denom = qnorm * e.norm;
        scored.push_back({denom > 0 ? dot / denom : 0.0, &e.instance_id});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return *a.second < *b.second;
    });
    std::vector<std::string> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) out.push_back(*scored[i].second);
    return out;
}

void save_index(const EmbeddingIndex& index, const std::string& path) {
    json entries = json::array();
    for (const auto& e : index.entries) {
        entries.push_back({{"instance_id", e.instance_id}, {"vector", e.vec}});
    }
    json doc = {{"embedder_fingerprint", index.embedder_fingerprint},
                {"dimension", index.dimension},
                {"entries", entries}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw RetrievalError(path + ": cannot open for writing");
        out << doc.dump();
    }
    std::filesystem::rename(tmp, path);
}

bool load_index(EmbeddingIndex& index, const std::string& path,
                const std::string& expected_fingerprint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return false;
    if (doc.value("embedder_fingerprint", std::string()) != expected_fingerprint) {
        return false;  // stale cache, caller regenerates
    }
    EmbeddingIndex loaded;
    loaded.embedder_fingerprint = expected_fingerprint;
    loaded.dimension = doc.value("dimension", size_t{0});
    for (const auto& je : doc.at("entries")) {
        EmbeddingIndex::Entry e;
        e.instance_id = je.at("instance_id").get<std::string>();
        e.vec = je.at("vector").get<std::vector<double>>();
        if (e.vec.size() != loaded.dimension) return false;
        double norm = 0;
        for (double x : e.vec) norm += x * x;
        e.norm = std::sqrt(norm);
        loaded.entries.push_back(std::move(e));
    }
    index = std::move(loaded);
    return true;
}

}  // namespace sgp
