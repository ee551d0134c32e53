#include "sgp/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sgp {

using nlohmann::json;

std::string_view to_string(Stratum s) {
    switch (s) {
        case Stratum::participants: return "participants";
        case Stratum::spatio_temporal: return "spatio_temporal";
        case Stratum::contextual_atmosphere: return "contextual_atmosphere";
        case Stratum::psychological: return "psychological";
    }
    return "participants";
}

std::optional<Stratum> stratum_from_string(std::string_view s) {
    if (s == "participants") return Stratum::participants;
    if (s == "spatio_temporal") return Stratum::spatio_temporal;
    if (s == "contextual_atmosphere") return Stratum::contextual_atmosphere;
    if (s == "psychological") return Stratum::psychological;
    return std::nullopt;
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::unknown_predicate: return "unknown_predicate";
        case ViolationKind::unknown_node_kind: return "unknown_node_kind";
        case ViolationKind::name_not_in_vocabulary: return "name_not_in_vocabulary";
        case ViolationKind::arity_violation: return "arity_violation";
        case ViolationKind::size_below_min: return "size_below_min";
        case ViolationKind::size_above_max: return "size_above_max";
        case ViolationKind::completeness_unmet: return "completeness_unmet";
        case ViolationKind::duplicate_triplet: return "duplicate_triplet";
    }
    return "unknown_predicate";
}

bool NodeKind::in_vocabulary(std::string_view name) const {
    return std::find(vocabulary.begin(), vocabulary.end(), name) != vocabulary.end();
}

bool Predicate::allows(std::string_view subject_kind, std::string_view object_kind) const {
    for (const auto& p : arity) {
        if (p.subject_kind == subject_kind && p.object_kind == object_kind) return true;
    }
    return false;
}

SchemaDef::SchemaDef(std::vector<NodeKind> kinds, std::vector<Predicate> predicates,
                     int min_triplets, int max_triplets,
                     std::vector<CompletenessRule> completeness_rules)
    : kinds_(std::move(kinds)),
      predicates_(std::move(predicates)),
      min_triplets_(min_triplets),
      max_triplets_(max_triplets),
      completeness_rules_(std::move(completeness_rules)) {
    for (size_t i = 0; i < kinds_.size(); ++i) kind_index_[kinds_[i].id] = i;
    for (size_t i = 0; i < predicates_.size(); ++i) predicate_index_[predicates_[i].id] = i;
    fingerprint_ = hex64(fnv1a64(serialize()));
}

const NodeKind* SchemaDef::find_kind(std::string_view id) const {
    auto it = kind_index_.find(id);
    return it == kind_index_.end() ? nullptr : &kinds_[it->second];
}

const Predicate* SchemaDef::find_predicate(std::string_view id) const {
    auto it = predicate_index_.find(id);
    return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

bool SchemaDef::arity_allows(std::string_view predicate, std::string_view subject_kind,
                             std::string_view object_kind) const {
    const Predicate* p = find_predicate(predicate);
    return p != nullptr && p->allows(subject_kind, object_kind);
}

std::vector<std::string> SchemaDef::kinds_in_stratum(Stratum s) const {
    std::vector<std::string> out;
    for (const auto& k : kinds_) {
        if (k.stratum == s) out.push_back(k.id);
    }
    return out;
}

std::string SchemaDef::serialize() const {
    json doc;
    json kinds = json::array();
    for (const auto& k : kinds_) {
        kinds.push_back({{"id", k.id},
                         {"stratum", std::string(to_string(k.stratum))},
                         {"vocabulary", k.vocabulary}});
    }
    json predicates = json::array();
    for (const auto& p : predicates_) {
        json arity = json::array();
        for (const auto& a : p.arity) arity.push_back({a.subject_kind, a.object_kind});
        predicates.push_back({{"id", p.id}, {"latent", p.latent}, {"arity", arity}});
    }
    json rules = json::array();
    for (const auto& r : completeness_rules_) {
        rules.push_back(
            {{"type", r.target == CompletenessRule::Target::predicate ? "predicate"
                                                                      : "object_kind"},
             {"id", r.id}});
    }
    doc["kinds"] = kinds;
    doc["predicates"] = predicates;
    doc["min_triplets"] = min_triplets_;
    doc["max_triplets"] = max_triplets_;
    doc["completeness_rules"] = rules;
    return doc.dump();
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

std::string require_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return canonical(j.get<std::string>());
}

const json& require_key(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path, std::string("missing key '") + key + "'");
    return j.at(key);
}

}  // namespace

SchemaDef load_schema(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) fail("$", "not valid JSON");
    if (!doc.is_object()) fail("$", "expected a JSON object");

    std::vector<NodeKind> kinds;
    std::set<std::string> kind_ids;
    const json& jkinds = require_key(doc, "kinds", "$");
    if (!jkinds.is_array()) fail("$.kinds", "expected an array");
    for (size_t i = 0; i < jkinds.size(); ++i) {
        const std::string path = "$.kinds[" + std::to_string(i) + "]";
        const json& jk = jkinds[i];
        NodeKind k;
        k.id = require_string(require_key(jk, "id", path), path + ".id");
        if (k.id.empty()) fail(path + ".id", "empty id");
        if (!kind_ids.insert(k.id).second) fail(path + ".id", "duplicate kind id '" + k.id + "'");
        auto stratum = stratum_from_string(
            require_string(require_key(jk, "stratum", path), path + ".stratum"));
        if (!stratum) fail(path + ".stratum", "unknown stratum");
        k.stratum = *stratum;
        const json& jvocab = require_key(jk, "vocabulary", path);
        if (!jvocab.is_array() || jvocab.empty()) fail(path + ".vocabulary", "empty vocabulary");
        std::set<std::string> seen;
        for (size_t v = 0; v < jvocab.size(); ++v) {
            std::string name =
                require_string(jvocab[v], path + ".vocabulary[" + std::to_string(v) + "]");
            if (name.empty() || !seen.insert(name).second) {
                fail(path + ".vocabulary[" + std::to_string(v) + "]",
                     "empty or duplicate name '" + name + "'");
            }
            k.vocabulary.push_back(std::move(name));
        }
        kinds.push_back(std::move(k));
    }

    std::vector<Predicate> predicates;
    std::set<std::string> predicate_ids;
    const json& jpreds = require_key(doc, "predicates", "$");
    if (!jpreds.is_array()) fail("$.predicates", "expected an array");
    for (size_t i = 0; i < jpreds.size(); ++i) {
        const std::string path = "$.predicates[" + std::to_string(i) + "]";
        const json& jp = jpreds[i];
        Predicate p;
        p.id = require_string(require_key(jp, "id", path), path + ".id");
        if (p.id.empty()) fail(path + ".id", "empty id");
        if (!predicate_ids.insert(p.id).second) {
            fail(path + ".id", "duplicate predicate id '" + p.id + "'");
        }
        const json& jlatent = require_key(jp, "latent", path);
        if (!jlatent.is_boolean()) fail(path + ".latent", "expected a boolean");
        p.latent = jlatent.get<bool>();
        const json& jarity = require_key(jp, "arity", path);
        if (!jarity.is_array() || jarity.empty()) fail(path + ".arity", "empty arity");
        for (size_t a = 0; a < jarity.size(); ++a) {
            const std::string apath = path + ".arity[" + std::to_string(a) + "]";
            const json& jpair = jarity[a];
            if (!jpair.is_array() || jpair.size() != 2) {
                fail(apath, "expected [subject_kind, object_kind]");
            }
            ArityPair pair{require_string(jpair[0], apath + "[0]"),
                           require_string(jpair[1], apath + "[1]")};
            if (!kind_ids.count(pair.subject_kind)) {
                fail(apath + "[0]", "unknown kind '" + pair.subject_kind + "'");
            }
            if (!kind_ids.count(pair.object_kind)) {
                fail(apath + "[1]", "unknown kind '" + pair.object_kind + "'");
            }
            p.arity.push_back(std::move(pair));
        }
        predicates.push_back(std::move(p));
    }

    const json& jmin = require_key(doc, "min_triplets", "$");
    const json& jmax = require_key(doc, "max_triplets", "$");
    if (!jmin.is_number_integer() || !jmax.is_number_integer()) {
        fail("$.min_triplets", "min/max must be integers");
    }
    int min_triplets = jmin.get<int>();
    int max_triplets = jmax.get<int>();
    if (min_triplets <= 0 || min_triplets > max_triplets) {
        fail("$.min_triplets", "need 0 < min_triplets <= max_triplets");
    }

    std::vector<CompletenessRule> rules;
    if (doc.contains("completeness_rules")) {
        const json& jrules = doc.at("completeness_rules");
        if (!jrules.is_array()) fail("$.completeness_rules", "expected an array");
        for (size_t i = 0; i < jrules.size(); ++i) {
            const std::string path = "$.completeness_rules[" + std::to_string(i) + "]";
            const json& jr = jrules[i];
            std::string type = require_string(require_key(jr, "type", path), path + ".type");
            CompletenessRule rule;
            rule.id = require_string(require_key(jr, "id", path), path + ".id");
            if (type == "predicate") {
                rule.target = CompletenessRule::Target::predicate;
                if (!predicate_ids.count(rule.id)) {
                    fail(path + ".id", "unknown predicate '" + rule.id + "'");
                }
            } else if (type == "object_kind") {
                rule.target = CompletenessRule::Target::object_kind;
                if (!kind_ids.count(rule.id)) {
                    fail(path + ".id", "unknown kind '" + rule.id + "'");
                }
            } else {
                fail(path + ".type", "expected 'predicate' or 'object_kind'");
            }
            rules.push_back(std::move(rule));
        }
    }

    return SchemaDef(std::move(kinds), std::move(predicates), min_triplets, max_triplets,
                     std::move(rules));
}

SchemaDef load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_schema(buf.str());
}

std::vector<Violation> check_triplet(const SchemaDef& schema, const Triplet& t) {
    std::vector<Violation> out;
    const std::string text = canonical_triplet_text(t);
    const Predicate* p = schema.find_predicate(t.predicate);
    if (p == nullptr) {
        out.push_back({ViolationKind::unknown_predicate, text,
                       "unknown predicate '" + t.predicate + "'"});
    }
    const NodeKind* ks = schema.find_kind(t.subject.kind);
    if (ks == nullptr) {
        out.push_back({ViolationKind::unknown_node_kind, text,
                       "unknown subject kind '" + t.subject.kind + "'"});
    } else if (!ks->in_vocabulary(t.subject.name)) {
        out.push_back({ViolationKind::name_not_in_vocabulary, text,
                       "'" + t.subject.name + "' not in vocabulary of '" + ks->id + "'"});
    }
    const NodeKind* ko = schema.find_kind(t.object.kind);
    if (ko == nullptr) {
        out.push_back({ViolationKind::unknown_node_kind, text,
                       "unknown object kind '" + t.object.kind + "'"});
    } else if (!ko->in_vocabulary(t.object.name)) {
        out.push_back({ViolationKind::name_not_in_vocabulary, text,
                       "'" + t.object.name + "' not in vocabulary of '" + ko->id + "'"});
    }
    if (p != nullptr && ks != nullptr && ko != nullptr &&
        !p->allows(t.subject.kind, t.object.kind)) {
        out.push_back({ViolationKind::arity_violation, text,
                       "(" + t.subject.kind + ", " + t.object.kind +
                           ") not a valid arity for '" + p->id + "'"});
    }
    return out;
}

std::vector<Violation> validate_graph(const SchemaDef& schema, const SituationGraph& g) {
    std::vector<Violation> out;
    std::set<std::string> seen;
    for (const auto& t : g.triplets) {
        auto per = check_triplet(schema, t);
        out.insert(out.end(), per.begin(), per.end());
        const std::string text = canonical_triplet_text(t);
        if (!seen.insert(text).second) {
            out.push_back({ViolationKind::duplicate_triplet, text, "duplicate triplet"});
        }
    }
    const int n = static_cast<int>(g.triplets.size());
    if (n < schema.min_triplets()) {
        out.push_back({ViolationKind::size_below_min, g.instance_id,
                       std::to_string(n) + " triplets < min " +
                           std::to_string(schema.min_triplets())});
    }
    if (n > schema.max_triplets()) {
        out.push_back({ViolationKind::size_above_max, g.instance_id,
                       std::to_string(n) + " triplets > max " +
                           std::to_string(schema.max_triplets())});
    }
    for (const auto& rule : schema.completeness_rules()) {
        bool met = false;
        for (const auto& t : g.triplets) {
            if (rule.target == CompletenessRule::Target::predicate
                    ? t.predicate == rule.id
                    : t.object.kind == rule.id) {
                met = true;
                break;
            }
        }
        if (!met) {
            out.push_back({ViolationKind::completeness_unmet, rule.id,
                           std::string("required ") +
                               (rule.target == CompletenessRule::Target::predicate
                                    ? "predicate '"
                                    : "object kind '") +
                               rule.id + "' never appears"});
        }
    }
    return out;
}

bool is_latent(const SchemaDef& schema, const Triplet& t) {
    const Predicate* p = schema.find_predicate(t.predicate);
    if (p != nullptr && p->latent) return true;
    const NodeKind* ko = schema.find_kind(t.object.kind);
    return ko != nullptr && ko->stratum == Stratum::psychological;
}

LatentSurfaceSplit partition_latent_surface(const SchemaDef& schema,
                                            const std::vector<Triplet>& triplets) {
    LatentSurfaceSplit split;
    for (const auto& t : triplets) {
        (is_latent(schema, t) ? split.latent : split.surface).push_back(t);
    }
    return split;
}

const SchemaDef& default_schema() {
    static const SchemaDef schema = load_schema(default_schema_json());
    return schema;
}

}  // namespace sgp
