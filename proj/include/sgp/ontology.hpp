#pragma once
// Schema definition and validation: node-kind taxonomy, predicate arity map,
// latent/surface partition and structural well-formedness of graphs.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sgp/graph.hpp"

namespace sgp {

enum class Stratum {
    participants,
    spatio_temporal,
    contextual_atmosphere,
    psychological,
};

std::string_view to_string(Stratum s);
std::optional<Stratum> stratum_from_string(std::string_view s);

struct NodeKind {
    std::string id;
    Stratum stratum = Stratum::participants;
    std::vector<std::string> vocabulary;  // canonical, order preserved

    bool in_vocabulary(std::string_view name) const;
};

struct ArityPair {
    std::string subject_kind;
    std::string object_kind;

    friend bool operator==(const ArityPair&, const ArityPair&) = default;
    friend auto operator<=>(const ArityPair&, const ArityPair&) = default;
};

struct Predicate {
    std::string id;
    bool latent = false;
    std::vector<ArityPair> arity;

    bool allows(std::string_view subject_kind, std::string_view object_kind) const;
};

struct CompletenessRule {
    enum class Target { predicate, object_kind };
    Target target = Target::predicate;
    std::string id;
};

enum class ViolationKind {
    unknown_predicate,
    unknown_node_kind,
    name_not_in_vocabulary,
    arity_violation,
    size_below_min,
    size_above_max,
    completeness_unmet,
    duplicate_triplet,
};

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string subject;  // offending triplet text or rule id
    std::string message;
};

// Raised by load_schema; message carries the offending path.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SchemaDef {
public:
    SchemaDef() = default;
    SchemaDef(std::vector<NodeKind> kinds, std::vector<Predicate> predicates,
              int min_triplets, int max_triplets,
              std::vector<CompletenessRule> completeness_rules);

    const std::vector<NodeKind>& kinds() const { return kinds_; }
    const std::vector<Predicate>& predicates() const { return predicates_; }
    int min_triplets() const { return min_triplets_; }
    int max_triplets() const { return max_triplets_; }
    const std::vector<CompletenessRule>& completeness_rules() const {
        return completeness_rules_;
    }

    const NodeKind* find_kind(std::string_view id) const;
    const Predicate* find_predicate(std::string_view id) const;
    bool arity_allows(std::string_view predicate, std::string_view subject_kind,
                      std::string_view object_kind) const;

    std::vector<std::string> kinds_in_stratum(Stratum s) const;

    // Canonical JSON rendering; load_schema(serialize()) round-trips exactly.
    std::string serialize() const;
    // Hash of the canonical serialization, used as the corpus schema_ref.
    const std::string& fingerprint() const { return fingerprint_; }

private:
    std::vector<NodeKind> kinds_;
    std::vector<Predicate> predicates_;
    int min_triplets_ = 1;
    int max_triplets_ = 1;
    std::vector<CompletenessRule> completeness_rules_;
    std::map<std::string, size_t, std::less<>> kind_index_;
    std::map<std::string, size_t, std::less<>> predicate_index_;
    std::string fingerprint_;
};

// Parses the schema file format (canonical JSON, see README) and verifies
// referential closure. Throws SchemaError with the offending path.
SchemaDef load_schema(const std::string& json_text);
SchemaDef load_schema_file(const std::string& path);

// The default shipped schema: 11 kinds, 14 predicates, 4 strata.
const std::string& default_schema_json();
const SchemaDef& default_schema();

std::vector<Violation> check_triplet(const SchemaDef& schema, const Triplet& t);
std::vector<Violation> validate_graph(const SchemaDef& schema, const SituationGraph& g);

// A triplet is latent iff its predicate is marked latent or its object kind
// lies in the psychological stratum.
bool is_latent(const SchemaDef& schema, const Triplet& t);

struct LatentSurfaceSplit {
    std::vector<Triplet> latent;
    std::vector<Triplet> surface;
};

LatentSurfaceSplit partition_latent_surface(const SchemaDef& schema,
                                            const std::vector<Triplet>& triplets);

}  // namespace sgp
