#include "sgp/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgp/backends.hpp"
#include "sgp/ontology.hpp"

namespace sgp {

using nlohmann::json;

GenConfig GenConfig::defaults(const SchemaDef& schema) {
    GenConfig cfg;
    cfg.n_instances = 75;
    for (const auto& d : default_domains()) cfg.domains.push_back({d, 1.0});
    cfg.triplet_count_range = {schema.min_triplets(), schema.max_triplets()};
    cfg.artifacts_per_instance = {3, 3};
    return cfg;
}

CueTable CueTable::from_json(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw GenError("cue table: not a JSON object");
    }
    CueTable table;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_array()) throw GenError("cue table: '" + key + "' is not an array");
        std::vector<std::string> phrases;
        for (const auto& p : value) phrases.push_back(canonical(p.get<std::string>()));
        table.phrases[canonical(key)] = std::move(phrases);
    }
    return table;
}

const CueTable& CueTable::defaults() {
    static const CueTable table = from_json(default_cue_table_json());
    return table;
}

void CueTable::check_covers(const SchemaDef& schema) const {
    for (const auto& kind : schema.kinds()) {
        if (kind.stratum != Stratum::psychological) continue;
        for (const auto& value : kind.vocabulary) {
            auto it = phrases.find(value);
            if (it == phrases.end() || it->second.empty()) {
                throw GenError("cue table: no phrases for " + kind.id + " value '" + value +
                               "'");
            }
        }
    }
}

void validate_config(const GenConfig& cfg, const SchemaDef& schema) {
    if (cfg.n_instances < 0) throw GenError("gen config: negative n_instances");
    if (cfg.domains.empty()) throw GenError("gen config: no domains");
    for (const auto& d : cfg.domains) {
        if (d.weight <= 0) throw GenError("gen config: non-positive weight for '" + d.name + "'");
    }
    const auto& tr = cfg.triplet_count_range;
    if (tr.lo > tr.hi || tr.lo < schema.min_triplets() || tr.hi > schema.max_triplets()) {
        throw GenError("gen config: triplet_count_range outside schema bounds");
    }
    const auto& ar = cfg.artifacts_per_instance;
    if (ar.lo < 1 || ar.lo > ar.hi) throw GenError("gen config: bad artifacts_per_instance");
    const size_t rules = schema.completeness_rules().size();
    if (rules > static_cast<size_t>(tr.hi)) {
        throw GenError("gen config: " + std::to_string(rules) +
                       " completeness rules cannot fit in a budget of " +
                       std::to_string(tr.hi) + " triplets");
    }
    // Every rule must be producible from the arity map.
    for (const auto& rule : schema.completeness_rules()) {
        if (rule.target == CompletenessRule::Target::predicate) continue;
        bool reachable = false;
        for (const auto& p : schema.predicates()) {
            for (const auto& a : p.arity) reachable = reachable || a.object_kind == rule.id;
        }
        if (!reachable) {
            throw GenError("gen config: no predicate can produce object kind '" + rule.id +
                           "'");
        }
    }
}

namespace {

constexpr int kMaxRejects = 1000;

Triplet sample_for_pair(const SchemaDef& schema, Rng& rng, const Predicate& p,
                        const ArityPair& pair) {
    const NodeKind* ks = schema.find_kind(pair.subject_kind);
    const NodeKind* ko = schema.find_kind(pair.object_kind);
    return Triplet(Node(ks->id, rng.pick(ks->vocabulary)), p.id,
                   Node(ko->id, rng.pick(ko->vocabulary)));
}

Triplet sample_for_rule(const SchemaDef& schema, Rng& rng, const CompletenessRule& rule) {
    if (rule.target == CompletenessRule::Target::predicate) {
        const Predicate* p = schema.find_predicate(rule.id);
        return sample_for_pair(schema, rng, *p, p->arity[rng.bounded(p->arity.size())]);
    }
    // Uniform over (predicate, pair) combinations hitting the object kind.
    std::vector<std::pair<const Predicate*, const ArityPair*>> options;
    for (const auto& p : schema.predicates()) {
        for (const auto& a : p.arity) {
            if (a.object_kind == rule.id) options.push_back({&p, &a});
        }
    }
    const auto& pick = options[rng.bounded(options.size())];
    return sample_for_pair(schema, rng, *pick.first, *pick.second);
}

}  // namespace

SituationGraph sample_graph(const SchemaDef& schema, const GenConfig& cfg, Rng& rng,
                            const std::string& domain, int time_index,
                            const std::string& instance_id) {
    (void)domain;  // the structural prior is domain-independent
    SituationGraph g;
    g.instance_id = instance_id;
    g.time_index = time_index;

    const auto& tr = cfg.triplet_count_range;
    int target = tr.lo + static_cast<int>(rng.bounded(static_cast<size_t>(tr.hi - tr.lo + 1)));
    target = std::max(target, static_cast<int>(schema.completeness_rules().size()));

    std::set<Triplet> seen;
    auto insert_unique = [&](auto&& sample) {
        for (int attempt = 0; attempt < kMaxRejects; ++attempt) {
            Triplet t = sample();
            if (seen.insert(t).second) {
                g.triplets.push_back(std::move(t));
                return;
            }
        }
        throw GenError("sample_graph: exceeded " + std::to_string(kMaxRejects) +
                       " duplicate rejections; vocabulary too small for the budget");
    };

    for (const auto& rule : schema.completeness_rules()) {
        insert_unique([&] { return sample_for_rule(schema, rng, rule); });
    }
    while (static_cast<int>(g.triplets.size()) < target) {
        insert_unique([&] {
            const Predicate& p = schema.predicates()[rng.bounded(schema.predicates().size())];
            return sample_for_pair(schema, rng, p, p.arity[rng.bounded(p.arity.size())]);
        });
    }
    return g;
}

namespace {

const std::vector<std::string>& genres() {
    static const std::vector<std::string> g = {"email", "chat_log", "calendar_entry",
                                               "social_post"};
    return g;
}

std::string sentence_for_surface(const Triplet& t) {
    const std::string& s = t.subject.name;
    const std::string& o = t.object.name;
    const std::string& p = t.predicate;
    if (p == "has_participant") return o + " was part of the " + s + ".";
    if (p == "has_role") return s + " acted as " + o + ".";
    if (p == "affiliated_with") return s + " is with " + o + " these days.";
    if (p == "occurs_at") return "the " + s + " took place at the " + o + ".";
    if (p == "occurs_during") return "the " + s + " ran through the " + o + ".";
    if (p == "involves_activity") return "the " + s + " centered on " + o + ".";
    if (p == "has_ambience") return "the " + s + " felt " + o + ".";
    if (p == "has_context") return "the " + s + " stayed strictly " + o + ".";
    if (p == "interacts_with") return s + " caught up with " + o + ".";
    if (p == "part_of") return "some " + s + " was folded into the " + o + ".";
    return s + " " + p + " " + o + ".";
}

// Latent states never appear by name; they surface as cue phrases. The
// subject still shows up verbatim when it is an observable node, so every
// non-psychological name in the graph lands in some artifact.
std::string sentence_for_latent(const Triplet& t, const SchemaDef& schema,
                                const CueTable& cues, Rng& rng) {
    const NodeKind* ko = schema.find_kind(t.object.kind);
    if (ko != nullptr && ko->stratum == Stratum::psychological) {
        auto it = cues.phrases.find(t.object.name);
        if (it != cues.phrases.end() && !it->second.empty()) {
            const NodeKind* ks = schema.find_kind(t.subject.kind);
            const bool subject_observable =
                ks == nullptr || ks->stratum != Stratum::psychological;
            return subject_observable ? t.subject.name + ": " + rng.pick(it->second) + "."
                                      : rng.pick(it->second) + ".";
        }
    }
    return sentence_for_surface(t);
}

bool graph_reads_negative(const SituationGraph& g) {
    static const std::set<std::string> negative = {"sadness", "anger", "fear", "stressed"};
    for (const auto& t : g.triplets) {
        if (t.object.kind == "valence" && t.object.name == "negative") return true;
        if (t.object.kind == "emotion" && negative.count(t.object.name)) return true;
    }
    return false;
}

std::string persona_handle(const std::map<std::string, std::string>& persona) {
    auto it = persona.find("name");
    if (it == persona.end()) return "user";
    auto tokens = tokenize(it->second);
    return tokens.empty() ? "user" : tokens[0];
}

std::string wrap_genre(const std::string& genre, const std::string& body,
                       const std::string& handle, const SituationGraph& g, Rng& rng) {
    if (genre == "email") {
        return "from: " + handle + "\nsubject: quick update\n\n" + body + "\n";
    }
    if (genre == "chat_log") {
        const int hour = 8 + static_cast<int>(rng.bounded(12));
        const int minute = static_cast<int>(rng.bounded(60));
        char stamp[16];
        std::snprintf(stamp, sizeof(stamp), "[%02d:%02d]", hour, minute);
        return std::string(stamp) + " " + handle + ": " + body + "\n";
    }
    if (genre == "calendar_entry") {
        return "title: t" + std::to_string(g.time_index) + " block\nnotes: " + body + "\n";
    }
    return body + " #day" + std::to_string(g.time_index) + "\n";  // social_post
}

}  // namespace

ArtifactBundle render_artifacts(const SituationGraph& g,
                                const std::map<std::string, std::string>& persona,
                                const GenConfig& cfg, const SchemaDef& schema,
                                const CueTable& cues, Rng& rng) {
    cues.check_covers(schema);
    const auto& ar = cfg.artifacts_per_instance;
    const int n = ar.lo + static_cast<int>(rng.bounded(static_cast<size_t>(ar.hi - ar.lo + 1)));

    std::vector<std::string> genre_order = genres();
    rng.shuffle(genre_order);

    // One sentence per triplet, dealt round-robin across the bundle.
    std::vector<std::string> bodies(static_cast<size_t>(n));
    const auto split = partition_latent_surface(schema, g.triplets);
    size_t slot = 0;
    for (const auto& t : split.surface) {
        auto& body = bodies[slot++ % bodies.size()];
        if (!body.empty()) body += " ";
        body += sentence_for_surface(t);
    }
    for (const auto& t : split.latent) {
        auto& body = bodies[slot++ % bodies.size()];
        if (!body.empty()) body += " ";
        body += sentence_for_latent(t, schema, cues, rng);
    }

    const std::string handle = persona_handle(persona);
    ArtifactBundle bundle;
    for (int i = 0; i < n; ++i) {
        Artifact a;
        a.artifact_id = g.instance_id + "-a" + std::to_string(i);
        a.meta["genre"] = genre_order[static_cast<size_t>(i) % genre_order.size()];
        std::string body = bodies[static_cast<size_t>(i)];
        if (body.empty()) body = "nothing new to report.";
        // A deterministic subset of instances carries media descriptor
        // records so the decomposition path sees every modality.
        const bool as_audio = g.time_index % 5 == 2 && i == n - 1;
        const bool as_image = g.time_index % 5 == 4 && i == n - 1;
        if (as_audio) {
            const bool tense = graph_reads_negative(g);
            a.modality = Modality::audio;
            a.content = "transcript: " + body + "\nvoice_tremor: " +
                        (tense ? "high" : "low") + "\nloudness: " +
                        (tense ? "loud" : "soft") + "\ntempo: " + (tense ? "fast" : "slow") +
                        "\n";
        } else if (as_image) {
            std::string tags;
            for (const auto& t : split.surface) {
                if (!tags.empty()) tags += ", ";
                tags += t.object.name;
            }
            if (tags.empty()) tags = "snapshot";
            a.modality = Modality::image;
            a.content = "scene: " + body + "\ntags: " + tags + "\n";
        } else {
            a.modality = Modality::text;
            a.content = wrap_genre(a.meta["genre"], body, handle, g, rng);
        }
        bundle.push_back(std::move(a));
    }
    return bundle;
}

ArtifactBundle render_artifacts_external(const SituationGraph& g,
                                         const std::map<std::string, std::string>& persona,
                                         const GenConfig& cfg, const SchemaDef& schema,
                                         TextGenerator& renderer, int max_retries) {
    const auto& ar = cfg.artifacts_per_instance;
    const int n = ar.lo;
    std::vector<std::string> surface_names;
    for (const auto& t : partition_latent_surface(schema, g.triplets).surface) {
        surface_names.push_back(t.subject.name);
        surface_names.push_back(t.object.name);
    }

    std::string prompt = "Render " + std::to_string(n) +
                         " short first-person artifacts (separated by a line containing only "
                         "---) consistent with this situation graph.\npersona:";
    for (const auto& [k, v] : persona) prompt += " " + k + "=" + v;
    prompt += "\ngraph:\n" + render_triplet_lines(g.triplets);

    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        GenParams params;
        params.instance_id = g.instance_id;
        params.seed = derive_seed({cfg.seed, static_cast<uint64_t>(g.time_index),
                                   static_cast<uint64_t>(attempt)});
        const std::string raw = renderer.generate(prompt, params);
        if (trim(raw).empty()) continue;

        // Accept only when every surface name appears verbatim.
        const std::string haystack = canonical(raw);
        bool covered = true;
        for (const auto& name : surface_names) {
            covered = covered && haystack.find(name) != std::string::npos;
        }
        if (!covered) continue;

        ArtifactBundle bundle;
        std::string part;
        std::istringstream in(raw);
        std::string line;
        auto flush = [&] {
            if (trim(part).empty()) return;
            Artifact a;
            a.artifact_id = g.instance_id + "-a" + std::to_string(bundle.size());
            a.modality = Modality::text;
            a.content = trim(part) + "\n";
            a.meta["genre"] = "external";
            bundle.push_back(std::move(a));
            part.clear();
        };
        while (std::getline(in, line)) {
            if (trim(line) == "---") {
                flush();
            } else {
                part += line + "\n";
            }
        }
        flush();
        if (static_cast<int>(bundle.size()) < n) continue;
        bundle.resize(static_cast<size_t>(n));
        return bundle;
    }
    throw GenError("external renderer: no consistent output for '" + g.instance_id +
                   "' after " + std::to_string(max_retries + 1) + " attempts");
}

Corpus generate_corpus(const SchemaDef& schema, const GenConfig& cfg,
                       const std::map<std::string, std::string>& persona,
                       const CueTable& cues) {
    validate_config(cfg, schema);
    if (cfg.renderer == RendererKind::template_renderer) cues.check_covers(schema);

    Corpus corpus;
    corpus.persona = persona;
    corpus.schema_fingerprint = schema.fingerprint();
    for (const auto& d : cfg.domains) corpus.domain_list.push_back(canonical(d.name));

    std::vector<double> weights;
    for (const auto& d : cfg.domains) weights.push_back(d.weight);

    int width = 4;
    for (int v = cfg.n_instances - 1; v >= 10000; v /= 10) ++width;
    width = std::min(width, 12);

    for (int i = 0; i < cfg.n_instances; ++i) {
        Rng rng(derive_seed({cfg.seed, static_cast<uint64_t>(i)}));
        char id[32];
        std::snprintf(id, sizeof(id), "inst_%0*d", width, i);

        Instance inst;
        inst.instance_id = id;
        inst.time_index = i;
        inst.domain = corpus.domain_list[rng.pick_weighted(weights)];
        inst.gold = sample_graph(schema, cfg, rng, inst.domain, i, inst.instance_id);
        inst.artifacts = render_artifacts(inst.gold, persona, cfg, schema, cues, rng);

        // Cosmetic calendar mapping onto the 2021-2025 window.
        const int month = cfg.n_instances > 1 ? (i * 60) / cfg.n_instances : 0;
        char date[16];
        std::snprintf(date, sizeof(date), "%04d-%02d", 2021 + month / 12, 1 + month % 12);
        for (auto& a : inst.artifacts) a.meta["date"] = date;

        corpus.instances.push_back(std::move(inst));
    }
    return corpus;
}

}  // namespace sgp
