#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sgp/ontology.hpp"
#include "sgp/rng.hpp"

using namespace sgp;

namespace {

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind) {
    return std::any_of(vs.begin(), vs.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

Triplet make(const char* sk, const char* sn, const char* p, const char* ok,
             const char* on) {
    return Triplet(Node(sk, sn), p, Node(ok, on));
}

}  // namespace

TEST_CASE("default schema matches the declared taxonomy size") {
    const SchemaDef& s = default_schema();
    CHECK(s.kinds().size() == 11);
    CHECK(s.predicates().size() == 14);

    size_t latent = 0;
    for (const auto& p : s.predicates()) latent += p.latent ? 1 : 0;
    CHECK(latent == 4);

    std::set<Stratum> strata;
    for (const auto& k : s.kinds()) strata.insert(k.stratum);
    CHECK(strata.size() == 4);

    // Psychological stratum holds emotion and valence; 8 latent values total,
    // 106 surface values across the other strata.
    size_t latent_values = 0, surface_values = 0;
    for (const auto& k : s.kinds()) {
        (k.stratum == Stratum::psychological ? latent_values : surface_values) +=
            k.vocabulary.size();
    }
    CHECK(latent_values == 8);
    CHECK(surface_values == 106);

    CHECK(s.find_kind("emotion") != nullptr);
    CHECK(s.find_kind("emotion")->stratum == Stratum::psychological);
    CHECK(s.find_kind("valence")->stratum == Stratum::psychological);
    CHECK(s.min_triplets() == 6);
    CHECK(s.max_triplets() == 18);
}

TEST_CASE("shipped schema file matches the embedded default") {
    SchemaDef from_file = load_schema_file(std::string(SGP_DATA_DIR) + "/default_schema.json");
    CHECK(from_file.fingerprint() == default_schema().fingerprint());
}

TEST_CASE("load_schema rejects dangling kind references with the offending path") {
    const char* text = R"({
      "kinds": [{"id": "person", "stratum": "participants", "vocabulary": ["elise"]}],
      "predicates": [{"id": "haunts", "latent": false, "arity": [["person", "ghost"]]}],
      "min_triplets": 1, "max_triplets": 2
    })";
    CHECK_THROWS_WITH_AS(load_schema(text),
                         doctest::Contains("unknown kind 'ghost'"), SchemaError);
    try {
        load_schema(text);
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("$.predicates[0].arity[0][1]") != std::string::npos);
    }
}

TEST_CASE("minimal two-kind schema loads") {
    const char* text = R"({
      "kinds": [
        {"id": "Person", "stratum": "participants", "vocabulary": ["Elise"]},
        {"id": "Emotion", "stratum": "psychological", "vocabulary": ["Joy"]}
      ],
      "predicates": [{"id": "feels", "latent": true, "arity": [["person", "emotion"]]}],
      "min_triplets": 1, "max_triplets": 1
    })";
    SchemaDef s = load_schema(text);
    CHECK(s.kinds().size() == 2);
    CHECK(s.find_kind("person") != nullptr);  // ids canonicalized
    CHECK(s.find_kind("person")->in_vocabulary("elise"));
    CHECK(s.arity_allows("feels", "person", "emotion"));
}

TEST_CASE("load_schema rejects duplicates and empty vocabularies") {
    CHECK_THROWS_AS(load_schema(R"({
      "kinds": [
        {"id": "person", "stratum": "participants", "vocabulary": ["a"]},
        {"id": "Person", "stratum": "participants", "vocabulary": ["b"]}
      ],
      "predicates": [], "min_triplets": 1, "max_triplets": 1
    })"),
                    SchemaError);
    CHECK_THROWS_AS(load_schema(R"({
      "kinds": [{"id": "person", "stratum": "participants", "vocabulary": []}],
      "predicates": [], "min_triplets": 1, "max_triplets": 1
    })"),
                    SchemaError);
    CHECK_THROWS_AS(load_schema("not json at all"), SchemaError);
    CHECK_THROWS_AS(load_schema(R"({
      "kinds": [{"id": "person", "stratum": "participants", "vocabulary": ["a"]}],
      "predicates": [], "min_triplets": 3, "max_triplets": 2
    })"),
                    SchemaError);
}

TEST_CASE("check_triplet accepts a valid latent triplet") {
    auto vs = check_triplet(default_schema(), make("person", "elise", "feels", "emotion",
                                                   "stressed"));
    CHECK(vs.empty());
}

TEST_CASE("check_triplet flags reversed roles as an arity violation") {
    auto vs = check_triplet(default_schema(), make("emotion", "stressed", "feels", "person",
                                                   "elise"));
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::arity_violation);
}

TEST_CASE("check_triplet flags an unknown predicate") {
    auto vs = check_triplet(default_schema(),
                            make("person", "elise", "admires", "person", "ben"));
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == ViolationKind::unknown_predicate);
}

TEST_CASE("check_triplet reports unknown kinds and out-of-vocabulary names") {
    auto vs = check_triplet(default_schema(),
                            make("ghost", "casper", "feels", "emotion", "smug"));
    CHECK(has_violation(vs, ViolationKind::unknown_node_kind));
    CHECK(has_violation(vs, ViolationKind::name_not_in_vocabulary));
    // Arity not judged while a kind is unknown.
    CHECK(!has_violation(vs, ViolationKind::arity_violation));
}

TEST_CASE("check_triplet is case and whitespace insensitive") {
    auto vs = check_triplet(default_schema(),
                            make("  Person ", " ELISE", "Feels", "Emotion", "Stressed "));
    CHECK(vs.empty());
}

TEST_CASE("validate_graph enforces bounds, completeness and set semantics") {
    const SchemaDef& s = default_schema();
    SituationGraph g;
    g.instance_id = "t";
    g.triplets = {
        make("event", "interview", "has_participant", "person", "elise"),
        make("event", "interview", "occurs_at", "location_type", "office"),
        make("person", "elise", "feels", "emotion", "stressed"),
        make("emotion", "stressed", "has_valence", "valence", "negative"),
        make("event", "interview", "has_context", "social_context", "professional"),
        make("person", "elise", "has_role", "role", "analyst"),
    };
    CHECK(validate_graph(s, g).empty());

    SUBCASE("below minimum") {
        g.triplets.pop_back();
        CHECK(has_violation(validate_graph(s, g), ViolationKind::size_below_min));
    }
    SUBCASE("above maximum") {
        const auto& people = s.find_kind("person")->vocabulary;
        for (const auto& a : people) {
            for (const auto& b : people) {
                if (g.triplets.size() > static_cast<size_t>(s.max_triplets())) break;
                if (a != b) g.triplets.push_back(make("person", a.c_str(), "interacts_with",
                                                      "person", b.c_str()));
            }
        }
        REQUIRE(g.triplets.size() > static_cast<size_t>(s.max_triplets()));
        CHECK(has_violation(validate_graph(s, g), ViolationKind::size_above_max));
    }
    SUBCASE("missing latent coverage") {
        g.triplets.erase(g.triplets.begin() + 2);  // the feels triplet
        g.triplets.push_back(make("person", "elise", "interacts_with", "person", "ben"));
        auto vs = validate_graph(s, g);
        CHECK(has_violation(vs, ViolationKind::completeness_unmet));
    }
    SUBCASE("duplicate triplet") {
        g.triplets.push_back(g.triplets.front());
        CHECK(has_violation(validate_graph(s, g), ViolationKind::duplicate_triplet));
    }
    SUBCASE("every individually valid triplet passes check_triplet") {
        for (const auto& t : g.triplets) CHECK(check_triplet(s, t).empty());
    }
}

TEST_CASE("partition_latent_surface splits on predicate or psychological object") {
    const SchemaDef& s = default_schema();
    auto feels = make("person", "elise", "feels", "emotion", "stressed");
    auto at = make("event", "interview", "occurs_at", "location_type", "office");

    auto split = partition_latent_surface(s, {feels});
    CHECK(split.latent.size() == 1);
    CHECK(split.surface.empty());

    split = partition_latent_surface(s, {at});
    CHECK(split.latent.empty());
    CHECK(split.surface.size() == 1);

    split = partition_latent_surface(s, {});
    CHECK(split.latent.empty());
    CHECK(split.surface.empty());
}

TEST_CASE("partition is exact for arbitrary triplets") {
    const SchemaDef& s = default_schema();
    Rng rng(7);
    const char* kinds[] = {"person", "emotion", "event", "valence", "mystery"};
    const char* preds[] = {"feels", "occurs_at", "evokes", "zzz", "interacts_with"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Triplet> ts;
        const size_t n = rng.bounded(8);
        for (size_t i = 0; i < n; ++i) {
            ts.push_back(make(kinds[rng.bounded(5)], "x", preds[rng.bounded(5)],
                              kinds[rng.bounded(5)], "y"));
        }
        auto split = partition_latent_surface(s, ts);
        CHECK(split.latent.size() + split.surface.size() == ts.size());
        for (const auto& t : split.latent) CHECK(is_latent(s, t));
        for (const auto& t : split.surface) CHECK(!is_latent(s, t));
    }
}

TEST_CASE("schema serialization round-trips") {
    const SchemaDef& s = default_schema();
    SchemaDef reloaded = load_schema(s.serialize());
    CHECK(reloaded.fingerprint() == s.fingerprint());
    CHECK(reloaded.serialize() == s.serialize());
    CHECK(reloaded.kinds().size() == s.kinds().size());
    CHECK(reloaded.predicates().size() == s.predicates().size());
    CHECK(reloaded.completeness_rules().size() == s.completeness_rules().size());
}
