#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "sgp/ontology.hpp"
#include "sgp/retrieval.hpp"
#include "sgp/synthgen.hpp"

using namespace sgp;

namespace {

Corpus small_corpus(int n, uint64_t seed) {
    GenConfig cfg = GenConfig::defaults(default_schema());
    cfg.seed = seed;
    cfg.n_instances = n;
    return generate_corpus(default_schema(), cfg, default_persona());
}

std::vector<const Instance*> all_instances(const Corpus& c) {
    std::vector<const Instance*> out;
    for (const auto& inst : c.instances) out.push_back(&inst);
    return out;
}

}  // namespace

TEST_CASE("embed_bundle is deterministic with the declared dimension") {
    Corpus c = small_corpus(4, 1);
    HashingEmbedder emb;
    auto v1 = embed_bundle(c.instances[0].artifacts, offline_encoders(), emb);
    auto v2 = embed_bundle(c.instances[0].artifacts, offline_encoders(), emb);
    CHECK(v1 == v2);
    CHECK(v1.size() == emb.dimension());
    CHECK_THROWS_AS(embed_bundle({}, offline_encoders(), emb), RetrievalError);
}

TEST_CASE("top_k ranks by cosine with ascending-id tie-break and self-exclusion") {
    Corpus c = small_corpus(8, 2);
    HashingEmbedder emb;
    EmbeddingIndex index = build_index(all_instances(c), offline_encoders(), emb);
    REQUIRE(index.size() == 8);
    CHECK(index.dimension == emb.dimension());

    const auto query = embed_bundle(c.instances[3].artifacts, offline_encoders(), emb);

    SUBCASE("self ranks first without exclusion") {
        auto ids = top_k(query, index, 1);
        CHECK(ids[0] == c.instances[3].instance_id);
    }
    SUBCASE("self never appears with exclusion") {
        auto ids = top_k(query, index, 7, c.instances[3].instance_id);
        CHECK(ids.size() == 7);
        for (const auto& id : ids) CHECK(id != c.instances[3].instance_id);
    }
    SUBCASE("k = index size returns a permutation of all ids") {
        auto ids = top_k(query, index, 8);
        std::set<std::string> unique(ids.begin(), ids.end());
        CHECK(unique.size() == 8);
    }
    SUBCASE("k beyond the post-exclusion size errors") {
        CHECK_THROWS_AS(top_k(query, index, 8, c.instances[3].instance_id), RetrievalError);
    }
    SUBCASE("top_k is a prefix of the full ranking") {
        auto full = top_k(query, index, 8);
        auto three = top_k(query, index, 3);
        CHECK(std::equal(three.begin(), three.end(), full.begin()));
    }
}

TEST_CASE("orthogonal query falls back to ascending id order") {
    EmbeddingIndex index;
    index.dimension = 3;
    index.entries.push_back({"b", {1, 0, 0}, 1.0});
    index.entries.push_back({"a", {0, 1, 0}, 1.0});
    index.entries.push_back({"c", {0, 1, 0}, 1.0});
    auto ids = top_k({0, 0, 1}, index, 3);
    CHECK(ids == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("bundles sharing no tokens stay nearly orthogonal") {
    HashingEmbedder emb;
    // Disjoint everywhere: ids, modality labels, descriptor keys and bodies.
    ArtifactBundle a = {{"x0", Modality::text,
                         "quarterly budget review with marcus in the conference hall", {}}};
    ArtifactBundle b = {{"y1", Modality::audio,
                         "transcript: yoga felt serene tonight, grateful\nloudness: soft\n",
                         {}}};
    auto va = embed_bundle(a, offline_encoders(), emb);
    auto vb = embed_bundle(b, offline_encoders(), emb);
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < va.size(); ++i) {
        dot += va[i] * vb[i];
        na += va[i] * va[i];
        nb += vb[i] * vb[i];
    }
    CHECK(std::abs(dot / std::sqrt(na * nb)) < 0.2);
}

TEST_CASE("index cache round-trips and rejects fingerprint mismatches") {
    Corpus c = small_corpus(5, 3);
    HashingEmbedder emb;
    EmbeddingIndex index = build_index(all_instances(c), offline_encoders(), emb);

    const std::string path =
        (std::filesystem::temp_directory_path() / "sgp_index_test.json").string();
    save_index(index, path);

    EmbeddingIndex loaded;
    REQUIRE(load_index(loaded, path, emb.fingerprint().str()));
    REQUIRE(loaded.size() == index.size());
    CHECK(loaded.dimension == index.dimension);
    for (size_t i = 0; i < index.size(); ++i) {
        CHECK(loaded.entries[i].instance_id == index.entries[i].instance_id);
        CHECK(loaded.entries[i].vec == index.entries[i].vec);
    }

    EmbeddingIndex stale;
    CHECK(!load_index(stale, path, "embedding:other:model:123"));
    CHECK(stale.entries.empty());
    CHECK(!load_index(stale, path + ".missing", emb.fingerprint().str()));
    std::remove(path.c_str());
}
