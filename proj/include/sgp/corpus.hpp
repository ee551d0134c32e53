#pragma once
// Artifact bundles, instances and the longitudinal corpus, plus the JSON-lines
// file format (header record first, one instance per following line).

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/graph.hpp"

namespace sgp {

class SchemaDef;

enum class Modality { text, image, audio };

std::string_view to_string(Modality m);
std::optional<Modality> modality_from_string(std::string_view s);

struct Artifact {
    std::string artifact_id;
    Modality modality = Modality::text;
    std::string content;
    std::map<std::string, std::string> meta;  // e.g. genre, date
};

using ArtifactBundle = std::vector<Artifact>;

struct Instance {
    std::string instance_id;
    int time_index = 0;
    std::string domain;
    ArtifactBundle artifacts;
    SituationGraph gold;
};

struct Corpus {
    std::map<std::string, std::string> persona;
    std::string schema_fingerprint;
    std::vector<std::string> domain_list;
    std::vector<Instance> instances;  // strictly increasing time_index

    const Instance* find_instance(std::string_view instance_id) const;
    size_t artifact_count() const;
};

const std::vector<std::string>& default_domains();
std::map<std::string, std::string> default_persona();

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_corpus(const Corpus& c, std::ostream& out);
void write_corpus_file(const Corpus& c, const std::string& path);  // atomic

// Reads the JSON-lines format; malformed records are reported with their line
// number. When a schema is supplied, its fingerprint must match the header.
Corpus read_corpus(std::istream& in, const SchemaDef* schema = nullptr);
Corpus read_corpus_file(const std::string& path, const SchemaDef* schema = nullptr);

}  // namespace sgp
