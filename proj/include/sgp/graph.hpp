#pragma once
// Situation-graph value types. A graph is a set of typed triplets
// (subject, predicate, object) over (kind, name) nodes; equality and hashing
// always go through the canonical lowercase-trimmed form.

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "sgp/text.hpp"

namespace sgp {

struct Node {
    std::string kind;
    std::string name;

    Node() = default;
    Node(std::string_view kind_, std::string_view name_)
        : kind(canonical(kind_)), name(canonical(name_)) {}

    friend bool operator==(const Node&, const Node&) = default;
    friend auto operator<=>(const Node&, const Node&) = default;
};

struct Triplet {
    Node subject;
    std::string predicate;
    Node object;

    Triplet() = default;
    Triplet(Node subject_, std::string_view predicate_, Node object_)
        : subject(std::move(subject_)),
          predicate(canonical(predicate_)),
          object(std::move(object_)) {}

    friend bool operator==(const Triplet&, const Triplet&) = default;
    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

// Deterministic rendering "kind:name|predicate|kind:name". Injective over
// canonical triplets; the basis for strict matching and embedding.
inline std::string canonical_triplet_text(const Triplet& t) {
    std::string out;
    out.reserve(t.subject.kind.size() + t.subject.name.size() + t.predicate.size() +
                t.object.kind.size() + t.object.name.size() + 4);
    out += t.subject.kind;
    out += ':';
    out += t.subject.name;
    out += '|';
    out += t.predicate;
    out += '|';
    out += t.object.kind;
    out += ':';
    out += t.object.name;
    return out;
}

struct SituationGraph {
    std::string instance_id;
    int time_index = 0;
    std::vector<Triplet> triplets;
};

}  // namespace sgp
