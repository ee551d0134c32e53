#pragma once
// Structure-first synthetic generation: sample an ontology-valid situation
// graph from the configured prior, then render an artifact bundle that is
// consistent with it by construction.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/corpus.hpp"
#include "sgp/graph.hpp"
#include "sgp/rng.hpp"

namespace sgp {

class SchemaDef;
class TextGenerator;

struct DomainWeight {
    std::string name;
    double weight = 1.0;
};

struct CountRange {
    int lo = 0;
    int hi = 0;
};

enum class RendererKind { template_renderer, external_service };

struct GenConfig {
    uint64_t seed = 0;
    int n_instances = 0;
    std::vector<DomainWeight> domains;
    CountRange triplet_count_range;     // within [schema.min, schema.max]
    CountRange artifacts_per_instance{3, 3};
    RendererKind renderer = RendererKind::template_renderer;

    static GenConfig defaults(const SchemaDef& schema);
};

struct GenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Phrases injected into artifact text for each emotion/valence value.
struct CueTable {
    std::map<std::string, std::vector<std::string>> phrases;

    static CueTable from_json(const std::string& json_text);
    static const CueTable& defaults();

    // Every psychological vocabulary value needs at least one phrase.
    void check_covers(const SchemaDef& schema) const;
};

const std::string& default_cue_table_json();

// Rejects impossible configurations (bad ranges, weights, completeness rules
// that cannot fit the triplet budget) before any sampling happens.
void validate_config(const GenConfig& cfg, const SchemaDef& schema);

// Samples a graph that passes validate_graph with zero violations:
// completeness rules first, then uniform predicate/arity/name draws with
// duplicate rejection. Deterministic given the rng stream.
SituationGraph sample_graph(const SchemaDef& schema, const GenConfig& cfg, Rng& rng,
                            const std::string& domain, int time_index,
                            const std::string& instance_id = "");

// Template renderer: every surface node name appears verbatim in some
// artifact and every latent triplet contributes a cue phrase.
ArtifactBundle render_artifacts(const SituationGraph& g,
                                const std::map<std::string, std::string>& persona,
                                const GenConfig& cfg, const SchemaDef& schema,
                                const CueTable& cues, Rng& rng);

// External renderer: prompts a text-generation backend and accepts the output
// only if every surface name is present, retrying up to max_retries.
ArtifactBundle render_artifacts_external(const SituationGraph& g,
                                         const std::map<std::string, std::string>& persona,
                                         const GenConfig& cfg, const SchemaDef& schema,
                                         TextGenerator& renderer, int max_retries = 3);

// Full corpus: n_instances instances with strictly increasing time indices,
// per-instance rng streams derived from (seed, index).
Corpus generate_corpus(const SchemaDef& schema, const GenConfig& cfg,
                       const std::map<std::string, std::string>& persona,
                       const CueTable& cues = CueTable::defaults());

}  // namespace sgp
