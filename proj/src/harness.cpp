#include "sgp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sgp/ontology.hpp"
#include "sgp/retrieval.hpp"
#include "sgp/rng.hpp"

namespace sgp {

using nlohmann::json;

SplitPlan make_splits(const Corpus& corpus, int folds, double test_fraction,
                      const std::string& stratify_by, uint64_t seed) {
    if (folds < 1) throw HarnessError("make_splits: folds must be >= 1");
    if (stratify_by != "domain" && stratify_by != "none") {
        throw HarnessError("make_splits: unsupported stratify field '" + stratify_by + "'");
    }
    SplitPlan plan;
    plan.stratify_by = stratify_by;
    plan.seed = seed;
    plan.folds.resize(static_cast<size_t>(folds));

    const size_t n = corpus.instances.size();
    if (test_fraction > 0 &&
        std::abs(test_fraction - 1.0 / folds) > 0.5 / std::max<size_t>(n, 1)) {
        std::ostringstream msg;
        msg << "test_fraction " << test_fraction << " is incompatible with a " << folds
            << "-fold partition; using 1/" << folds;
        plan.warnings.push_back(msg.str());
    }

    std::map<std::string, std::vector<std::string>> groups;
    std::map<std::string, int> position;  // corpus order, for time-sorting
    for (size_t i = 0; i < n; ++i) {
        const Instance& inst = corpus.instances[i];
        const std::string key = stratify_by == "domain" ? inst.domain : "all";
        groups[key].push_back(inst.instance_id);
        position[inst.instance_id] = static_cast<int>(i);
    }

    // Deal shuffled strata onto folds with a cursor that rolls across strata,
    // keeping both global fold sizes and per-stratum counts within one.
    size_t cursor = 0;
    for (auto& [stratum, ids] : groups) {
        if (ids.size() < static_cast<size_t>(folds)) {
            plan.warnings.push_back("stratum '" + stratum + "' has " +
                                    std::to_string(ids.size()) + " instances for " +
                                    std::to_string(folds) + " folds");
        }
        Rng rng(derive_seed({seed, fnv1a64(stratum)}));
        rng.shuffle(ids);
        for (const auto& id : ids) {
            plan.folds[cursor++ % static_cast<size_t>(folds)].test_ids.push_back(id);
        }
    }

    std::set<std::string> all_ids;
    for (const auto& inst : corpus.instances) all_ids.insert(inst.instance_id);
    for (auto& fold : plan.folds) {
        std::sort(fold.test_ids.begin(), fold.test_ids.end(),
                  [&](const std::string& a, const std::string& b) {
                      return position[a] < position[b];
                  });
        std::set<std::string> test_set(fold.test_ids.begin(), fold.test_ids.end());
        for (const auto& inst : corpus.instances) {
            if (!test_set.count(inst.instance_id)) {
                fold.retrieval_ids.push_back(inst.instance_id);
            }
        }
    }
    return plan;
}

std::string plan_to_json(const SplitPlan& plan) {
    json folds = json::array();
    for (const auto& f : plan.folds) {
        folds.push_back({{"retrieval_ids", f.retrieval_ids}, {"test_ids", f.test_ids}});
    }
    json doc = {{"folds", folds},
                {"stratify_by", plan.stratify_by},
                {"seed", plan.seed},
                {"warnings", plan.warnings}};
    return doc.dump();
}

SplitPlan plan_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw HarnessError("split plan: not a JSON object");
    }
    SplitPlan plan;
    try {
        plan.stratify_by = doc.value("stratify_by", std::string("domain"));
        plan.seed = doc.value("seed", uint64_t{0});
        if (doc.contains("warnings")) {
            plan.warnings = doc.at("warnings").get<std::vector<std::string>>();
        }
        for (const auto& jf : doc.at("folds")) {
            Fold f;
            f.retrieval_ids = jf.at("retrieval_ids").get<std::vector<std::string>>();
            f.test_ids = jf.at("test_ids").get<std::vector<std::string>>();
            plan.folds.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw HarnessError(std::string("split plan: ") + e.what());
    }
    return plan;
}

void save_plan(const SplitPlan& plan, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw HarnessError(path + ": cannot open for writing");
        out << plan_to_json(plan) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

SplitPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw HarnessError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return plan_from_json(buf.str());
}

std::string_view to_string(Protocol p) {
    return p == Protocol::zero_shot ? "zero_shot" : "ra_icl";
}

std::string_view to_string(TaskMode m) {
    switch (m) {
        case TaskMode::static_mode: return "static";
        case TaskMode::temporal_oracle: return "temporal_oracle";
        case TaskMode::temporal_autoregressive: return "temporal_autoregressive";
    }
    return "static";
}

std::optional<Protocol> protocol_from_string(std::string_view s) {
    if (s == "zero_shot") return Protocol::zero_shot;
    if (s == "ra_icl") return Protocol::ra_icl;
    return std::nullopt;
}

std::optional<TaskMode> task_mode_from_string(std::string_view s) {
    if (s == "static") return TaskMode::static_mode;
    if (s == "temporal_oracle") return TaskMode::temporal_oracle;
    if (s == "temporal_autoregressive") return TaskMode::temporal_autoregressive;
    return std::nullopt;
}

std::string schema_prompt_block(const SchemaDef& schema) {
    std::string out = "## schema\nkinds:\n";
    for (const auto& k : schema.kinds()) {
        out += "  - " + k.id + " (" + std::string(to_string(k.stratum)) + "): ";
        for (size_t i = 0; i < k.vocabulary.size(); ++i) {
            if (i > 0) out += ", ";
            out += k.vocabulary[i];
        }
        out += "\n";
    }
    out += "predicates:\n";
    for (const auto& p : schema.predicates()) {
        out += "  - " + p.id + (p.latent ? " [latent]" : "") + ":";
        for (size_t i = 0; i < p.arity.size(); ++i) {
            out += (i > 0 ? ", (" : " (") + p.arity[i].subject_kind + " -> " +
                   p.arity[i].object_kind + ")";
        }
        out += "\n";
    }
    out += "constraints: between " + std::to_string(schema.min_triplets()) + " and " +
           std::to_string(schema.max_triplets()) + " triplets";
    if (!schema.completeness_rules().empty()) {
        out += "; required: ";
        for (size_t i = 0; i < schema.completeness_rules().size(); ++i) {
            if (i > 0) out += ", ";
            out += schema.completeness_rules()[i].id;
        }
    }
    out += "\n";
    return out;
}

std::string build_prompt(const SchemaDef& schema, const std::string& query_bundle_text,
                         const std::vector<Demonstration>& demonstrations,
                         const std::vector<SituationGraph>& history) {
    std::string out =
        "Infer the situation graph that best explains the evidence artifacts.\n\n";
    out += schema_prompt_block(schema);
    if (!history.empty()) {
        out += "\n## history (oldest first)\n";
        for (const auto& g : history) {
            out += "graph at t=" + std::to_string(g.time_index) + ":\n";
            out += render_triplet_lines(g.triplets);
        }
    }
    if (!demonstrations.empty()) {
        out += "\n## demonstrations\n";
        for (size_t i = 0; i < demonstrations.size(); ++i) {
            out += "### example " + std::to_string(i + 1) + "\nartifacts:\n";
            out += demonstrations[i].bundle_text;
            out += "expected triplets:\n";
            out += render_triplet_lines(demonstrations[i].gold);
        }
    }
    out += "\n## query artifacts\n" + query_bundle_text;
    out +=
        "\n## output format\n"
        "One triplet per line, exactly:\n"
        "subject_kind:subject_name | predicate | object_kind:object_name\n"
        "Use only kinds, names and predicates from the schema. No other text.\n";
    return out;
}

ParseResult parse_prediction(const std::string& raw) {
    ParseResult res;
    std::set<Triplet> seen;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        if ((s.size() > 1) && (s[0] == '-' || s[0] == '*') && s[1] == ' ') {
            s = trim(s.substr(2));  // tolerate bullet prefixes
        }
        const auto p1 = s.find('|');
        const auto p2 = p1 == std::string::npos ? std::string::npos : s.find('|', p1 + 1);
        const auto p3 = p2 == std::string::npos ? std::string::npos : s.find('|', p2 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos || p3 != std::string::npos) {
            ++res.parse_failures;
            continue;
        }
        auto parse_node = [](const std::string& field, bool& ok) {
            const auto colon = field.find(':');
            if (colon == std::string::npos) {
                ok = false;
                return Node();
            }
            Node n(field.substr(0, colon), field.substr(colon + 1));
            ok = !n.kind.empty() && !n.name.empty();
            return n;
        };
        bool ok_s = true, ok_o = true;
        Node subject = parse_node(s.substr(0, p1), ok_s);
        Node object = parse_node(s.substr(p2 + 1), ok_o);
        const std::string predicate = canonical(s.substr(p1 + 1, p2 - p1 - 1));
        if (!ok_s || !ok_o || predicate.empty()) {
            ++res.parse_failures;
            continue;
        }
        Triplet t(std::move(subject), predicate, std::move(object));
        if (seen.insert(t).second) res.triplets.push_back(std::move(t));
    }
    return res;
}

namespace {

void validate_protocol(const ProtocolConfig& cfg) {
    if (cfg.k < 0) throw HarnessError("protocol config: k must be >= 0");
    if (cfg.protocol == Protocol::ra_icl && cfg.k < 1) {
        throw HarnessError("protocol config: ra_icl requires k >= 1");
    }
    if (cfg.task_mode != TaskMode::static_mode && cfg.context_window < 1) {
        throw HarnessError("protocol config: temporal modes require context_window >= 1");
    }
    if (cfg.runs_per_fold < 1) throw HarnessError("protocol config: runs_per_fold >= 1");
    if (cfg.tau < 0.0 || cfg.tau > 1.0) throw HarnessError("protocol config: tau in [0,1]");
}

// Bounded deterministic task runner; results land in preassigned slots so
// thread scheduling never changes the report.
template <typename Fn>
void run_tasks(size_t n_tasks, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n_tasks <= 1) {
        for (size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const size_t n_threads = std::min(static_cast<size_t>(jobs), n_tasks);
    threads.reserve(n_threads);
    for (size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct FoldRunOutput {
    std::vector<InstanceRecord> records;
    size_t leak_checks = 0;
};

}  // namespace

EvalReport run_experiment(const Corpus& corpus, const SchemaDef& schema,
                          const SplitPlan& plan, const ProtocolConfig& cfg,
                          const RunBackends& backends, int jobs) {
    validate_protocol(cfg);
    if (backends.predictor == nullptr || backends.embedder == nullptr) {
        throw HarnessError("run_experiment: predictor and embedder are required");
    }
    if (!corpus.schema_fingerprint.empty() &&
        corpus.schema_fingerprint != schema.fingerprint()) {
        throw HarnessError("run_experiment: corpus/schema fingerprint mismatch");
    }
    const EncoderSet& encoders =
        backends.encoders != nullptr ? *backends.encoders : offline_encoders();

    const EntropyContext entropy =
        EntropyContext::from_corpus(corpus, schema, cfg.entropy_mode);

    // Deterministic predictors that ignore the run seed collapse to one
    // effective run; the remaining runs are copies.
    const bool multi_run =
        backends.predictor->seed_sensitive() || !backends.predictor->deterministic();
    const int effective_runs = multi_run ? cfg.runs_per_fold : 1;

    const size_t n_folds = plan.folds.size();
    std::vector<FoldRunOutput> outputs(n_folds * static_cast<size_t>(effective_runs));

    auto run_cell = [&](size_t task_index) {
        const size_t fold_index = task_index / static_cast<size_t>(effective_runs);
        const int run = static_cast<int>(task_index % static_cast<size_t>(effective_runs));
        const Fold& fold = plan.folds[fold_index];
        FoldRunOutput& out = outputs[task_index];

        std::vector<const Instance*> test_instances;
        for (const auto& id : fold.test_ids) {
            const Instance* inst = corpus.find_instance(id);
            if (inst == nullptr) throw HarnessError("split plan references unknown id " + id);
            test_instances.push_back(inst);
        }
        std::sort(test_instances.begin(), test_instances.end(),
                  [](const Instance* a, const Instance* b) {
                      return a->time_index < b->time_index;
                  });
        const std::set<std::string> test_id_set(fold.test_ids.begin(), fold.test_ids.end());

        std::vector<const Instance*> retrieval_instances;
        EmbeddingIndex index;
        if (cfg.protocol == Protocol::ra_icl) {
            for (const auto& id : fold.retrieval_ids) {
                const Instance* inst = corpus.find_instance(id);
                if (inst == nullptr) {
                    throw HarnessError("split plan references unknown id " + id);
                }
                retrieval_instances.push_back(inst);
            }
            index = build_index(retrieval_instances, encoders, *backends.embedder);
        }

        std::map<std::string, std::vector<Triplet>> predicted;  // this fold-run
        for (const Instance* inst : test_instances) {
            InstanceRecord rec;
            rec.fold = static_cast<int>(fold_index);
            rec.run = run;
            rec.instance_id = inst->instance_id;
            try {
                const std::string flat = decompose_and_flatten(inst->artifacts, encoders);

                std::vector<Demonstration> demos;
                if (cfg.protocol == Protocol::ra_icl) {
                    const auto query = backends.embedder->embed({flat});
                    const auto ids = top_k(query.at(0), index,
                                           static_cast<size_t>(cfg.k), inst->instance_id);
                    for (const auto& id : ids) {
                        ++out.leak_checks;
                        if (test_id_set.count(id)) {
                            throw HarnessError("retrieval leak: demonstration '" + id +
                                               "' belongs to the active test fold");
                        }
                        const Instance* demo = corpus.find_instance(id);
                        demos.push_back({decompose_and_flatten(demo->artifacts, encoders),
                                         demo->gold.triplets});
                    }
                }

                std::vector<SituationGraph> history;
                if (cfg.task_mode != TaskMode::static_mode) {
                    // The context_window corpus instances immediately before
                    // this one, oldest first.
                    std::vector<const Instance*> preceding;
                    for (const auto& prior : corpus.instances) {
                        if (prior.time_index < inst->time_index) preceding.push_back(&prior);
                    }
                    const size_t window = std::min(preceding.size(),
                                                   static_cast<size_t>(cfg.context_window));
                    for (size_t i = preceding.size() - window; i < preceding.size(); ++i) {
                        const Instance* prior = preceding[i];
                        auto it = predicted.end();
                        if (cfg.task_mode == TaskMode::temporal_autoregressive) {
                            it = predicted.find(prior->instance_id);
                        }
                        if (it != predicted.end()) {
                            SituationGraph g;
                            g.instance_id = prior->instance_id;
                            g.time_index = prior->time_index;
                            g.triplets = it->second;
                            history.push_back(std::move(g));
                        } else {
                            history.push_back(prior->gold);
                            if (cfg.task_mode == TaskMode::temporal_autoregressive) {
                                ++rec.history_gold_fallbacks;  // cold start
                            }
                        }
                    }
                }

                const std::string prompt = build_prompt(schema, flat, demos, history);
                GenParams params;
                params.instance_id = inst->instance_id;
                params.seed = derive_seed({cfg.seed, fold_index, static_cast<uint64_t>(run),
                                           fnv1a64(inst->instance_id)});
                const std::string raw = backends.predictor->generate(prompt, params);
                ParseResult parsed = parse_prediction(raw);
                rec.parse_failures = parsed.parse_failures;
                rec.metrics = score_instance(parsed.triplets, inst->gold.triplets, schema,
                                             *backends.embedder, cfg.tau, entropy);
                predicted[inst->instance_id] = std::move(parsed.triplets);
            } catch (const HarnessError&) {
                throw;  // leak assertions are fatal, never recorded away
            } catch (const std::exception& e) {
                rec.errored = true;
                rec.error = e.what();
            }
            out.records.push_back(std::move(rec));
        }
    };

    run_tasks(outputs.size(), jobs, run_cell);

    EvalReport report;
    report.config = cfg;
    report.schema_fingerprint = schema.fingerprint();
    report.predictor_fingerprint = backends.predictor->fingerprint().str();
    report.embedder_fingerprint = backends.embedder->fingerprint().str();
    report.plan_seed = plan.seed;
    report.entropy = entropy;

    for (size_t f = 0; f < n_folds; ++f) {
        for (int run = 0; run < cfg.runs_per_fold; ++run) {
            const int source_run = multi_run ? run : 0;
            const FoldRunOutput& out =
                outputs[f * static_cast<size_t>(effective_runs) +
                        static_cast<size_t>(source_run)];
            if (run == source_run) report.n_leak_checks += out.leak_checks;
            for (InstanceRecord rec : out.records) {
                rec.run = run;
                report.n_errored += rec.errored ? 1 : 0;
                report.records.push_back(std::move(rec));
            }
        }
    }
    report.aggregates = aggregate(report.records);
    report.empty_summary = !report.records.empty() && report.aggregates.empty();
    return report;
}

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

// Sample SD (n-1); 0 by convention for fewer than two points.
double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void collect(const InstanceRecord& rec,
             std::map<std::string, std::vector<std::pair<int64_t, double>>>& values) {
    const int64_t group = (static_cast<int64_t>(rec.fold) << 20) | rec.run;
    auto put = [&](const char* key, double v) { values[key].push_back({group, v}); };
    put("strict_precision", rec.metrics.strict.precision);
    put("strict_recall", rec.metrics.strict.recall);
    put("strict_f1", rec.metrics.strict.f1);
    put("soft_precision", rec.metrics.soft.precision);
    put("soft_recall", rec.metrics.soft.recall);
    put("soft_f1", rec.metrics.soft.f1);
    put("soft_latent_precision", rec.metrics.soft_latent.precision);
    put("soft_latent_recall", rec.metrics.soft_latent.recall);
    put("soft_latent_f1", rec.metrics.soft_latent.f1);
    put("soft_surface_precision", rec.metrics.soft_surface.precision);
    put("soft_surface_recall", rec.metrics.soft_surface.recall);
    put("soft_surface_f1", rec.metrics.soft_surface.f1);
    put("pvr", rec.metrics.pvr);
    put("gap_ls", rec.metrics.gap_ls);
    if (rec.metrics.latent_f1_norm) put("latent_f1_norm", *rec.metrics.latent_f1_norm);
    if (rec.metrics.surface_f1_norm) put("surface_f1_norm", *rec.metrics.surface_f1_norm);
    if (rec.metrics.gap_norm) put("gap_norm", *rec.metrics.gap_norm);
    put("parse_failures", static_cast<double>(rec.parse_failures));
}

}  // namespace

std::map<std::string, AggregateEntry> aggregate(const std::vector<InstanceRecord>& records) {
    std::map<std::string, std::vector<std::pair<int64_t, double>>> values;
    for (const auto& rec : records) {
        if (!rec.errored) collect(rec, values);
    }
    std::map<std::string, AggregateEntry> out;
    for (const auto& [key, pairs] : values) {
        AggregateEntry entry;
        entry.n_records = pairs.size();
        std::vector<double> flat;
        std::map<int64_t, std::vector<double>> by_group;
        for (const auto& [group, v] : pairs) {
            flat.push_back(v);
            by_group[group].push_back(v);
        }
        entry.mean = mean_of(flat);
        entry.sd_instance = sample_sd(flat);
        std::vector<double> group_means;
        for (const auto& [group, vs] : by_group) group_means.push_back(mean_of(vs));
        entry.mean_foldrun = mean_of(group_means);
        entry.sd_foldrun = sample_sd(group_means);
        out[key] = entry;
    }
    return out;
}

namespace {

json prf_to_json(const PRF& prf) {
    return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

PRF prf_from_json(const json& j) {
    PRF prf;
    prf.precision = j.at("precision").get<double>();
    prf.recall = j.at("recall").get<double>();
    prf.f1 = j.at("f1").get<double>();
    return prf;
}

json optional_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    json records = json::array();
    for (const auto& rec : report.records) {
        json jm = {{"strict", prf_to_json(rec.metrics.strict)},
                   {"soft", prf_to_json(rec.metrics.soft)},
                   {"soft_latent", prf_to_json(rec.metrics.soft_latent)},
                   {"soft_surface", prf_to_json(rec.metrics.soft_surface)},
                   {"pvr", rec.metrics.pvr},
                   {"gap_ls", rec.metrics.gap_ls},
                   {"latent_f1_norm", optional_to_json(rec.metrics.latent_f1_norm)},
                   {"surface_f1_norm", optional_to_json(rec.metrics.surface_f1_norm)},
                   {"gap_norm", optional_to_json(rec.metrics.gap_norm)}};
        records.push_back({{"fold", rec.fold},
                           {"run", rec.run},
                           {"instance_id", rec.instance_id},
                           {"metrics", jm},
                           {"parse_failures", rec.parse_failures},
                           {"history_gold_fallbacks", rec.history_gold_fallbacks},
                           {"errored", rec.errored},
                           {"error", rec.error}});
    }
    json aggregates = json::object();
    for (const auto& [key, entry] : report.aggregates) {
        aggregates[key] = {{"mean", entry.mean},
                           {"mean_foldrun", entry.mean_foldrun},
                           {"sd_foldrun", entry.sd_foldrun},
                           {"sd_instance", entry.sd_instance},
                           {"n_records", entry.n_records}};
    }
    json doc = {
        {"config",
         {{"protocol", std::string(to_string(report.config.protocol))},
          {"task_mode", std::string(to_string(report.config.task_mode))},
          {"k", report.config.k},
          {"context_window", report.config.context_window},
          {"runs_per_fold", report.config.runs_per_fold},
          {"tau", report.config.tau},
          {"seed", report.config.seed},
          {"entropy_mode", std::string(to_string(report.config.entropy_mode))},
          {"plan_seed", report.plan_seed},
          {"schema_fingerprint", report.schema_fingerprint},
          {"predictor_fingerprint", report.predictor_fingerprint},
          {"embedder_fingerprint", report.embedder_fingerprint}}},
        {"entropy",
         {{"h_latent_cat", report.entropy.h_latent_cat},
          {"h_surface_cat", report.entropy.h_surface_cat},
          {"h_surface_base", report.entropy.h_surface_base}}},
        {"records", records},
        {"aggregates", aggregates},
        {"n_errored", report.n_errored},
        {"n_leak_checks", report.n_leak_checks},
        {"empty_summary", report.empty_summary}};
    return doc.dump();
}

EvalReport report_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw HarnessError("report: not a JSON object");
    }
    EvalReport report;
    try {
        const json& jc = doc.at("config");
        auto protocol = protocol_from_string(jc.at("protocol").get<std::string>());
        auto mode = task_mode_from_string(jc.at("task_mode").get<std::string>());
        auto entropy_mode = entropy_mode_from_string(jc.at("entropy_mode").get<std::string>());
        if (!protocol || !mode || !entropy_mode) {
            throw HarnessError("report: bad protocol/task_mode/entropy_mode");
        }
        report.config.protocol = *protocol;
        report.config.task_mode = *mode;
        report.config.entropy_mode = *entropy_mode;
        report.config.k = jc.at("k").get<int>();
        report.config.context_window = jc.at("context_window").get<int>();
        report.config.runs_per_fold = jc.at("runs_per_fold").get<int>();
        report.config.tau = jc.at("tau").get<double>();
        report.config.seed = jc.at("seed").get<uint64_t>();
        report.plan_seed = jc.at("plan_seed").get<uint64_t>();
        report.schema_fingerprint = jc.at("schema_fingerprint").get<std::string>();
        report.predictor_fingerprint = jc.at("predictor_fingerprint").get<std::string>();
        report.embedder_fingerprint = jc.at("embedder_fingerprint").get<std::string>();
        const json& je = doc.at("entropy");
        report.entropy.h_latent_cat = je.at("h_latent_cat").get<double>();
        report.entropy.h_surface_cat = je.at("h_surface_cat").get<double>();
        report.entropy.h_surface_base = je.at("h_surface_base").get<double>();
        for (const auto& jr : doc.at("records")) {
            InstanceRecord rec;
            rec.fold = jr.at("fold").get<int>();
            rec.run = jr.at("run").get<int>();
            rec.instance_id = jr.at("instance_id").get<std::string>();
            rec.parse_failures = jr.at("parse_failures").get<int>();
            rec.history_gold_fallbacks = jr.at("history_gold_fallbacks").get<int>();
            rec.errored = jr.at("errored").get<bool>();
            rec.error = jr.at("error").get<std::string>();
            const json& jm = jr.at("metrics");
            rec.metrics.strict = prf_from_json(jm.at("strict"));
            rec.metrics.soft = prf_from_json(jm.at("soft"));
            rec.metrics.soft_latent = prf_from_json(jm.at("soft_latent"));
            rec.metrics.soft_surface = prf_from_json(jm.at("soft_surface"));
            rec.metrics.pvr = jm.at("pvr").get<double>();
            rec.metrics.gap_ls = jm.at("gap_ls").get<double>();
            rec.metrics.latent_f1_norm = optional_from_json(jm.at("latent_f1_norm"));
            rec.metrics.surface_f1_norm = optional_from_json(jm.at("surface_f1_norm"));
            rec.metrics.gap_norm = optional_from_json(jm.at("gap_norm"));
            report.records.push_back(std::move(rec));
        }
        for (const auto& [key, ja] : doc.at("aggregates").items()) {
            AggregateEntry entry;
            entry.mean = ja.at("mean").get<double>();
            entry.mean_foldrun = ja.at("mean_foldrun").get<double>();
            entry.sd_foldrun = ja.at("sd_foldrun").get<double>();
            entry.sd_instance = ja.at("sd_instance").get<double>();
            entry.n_records = ja.at("n_records").get<size_t>();
            report.aggregates[key] = entry;
        }
        report.n_errored = doc.at("n_errored").get<size_t>();
        report.n_leak_checks = doc.at("n_leak_checks").get<size_t>();
        report.empty_summary = doc.at("empty_summary").get<bool>();
    } catch (const json::exception& e) {
        throw HarnessError(std::string("report: ") + e.what());
    }
    return report;
}

void save_report(const EvalReport& report, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw HarnessError(path + ": cannot open for writing");
        out << report_to_json(report) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

EvalReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw HarnessError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

std::vector<TableRow> table_model(const EvalReport& a, const EvalReport* b) {
    static const std::vector<std::pair<std::string, std::string>> rows = {
        {"Strict F1", "strict_f1"},
        {"Soft F1", "soft_f1"},
        {"Violation Rate (PVR)", "pvr"},
        {"Latent F1 (soft)", "soft_latent_f1"},
        {"Surface F1 (soft)", "soft_surface_f1"},
        {"Gap (LS)", "gap_ls"},
        {"Latent F1* (norm.)", "latent_f1_norm"},
        {"Surface F1* (norm.)", "surface_f1_norm"},
        {"Gap (norm.)", "gap_norm"},
    };
    std::vector<TableRow> out;
    for (const auto& [label, key] : rows) {
        TableRow row;
        row.label = label;
        row.key = key;
        auto ita = a.aggregates.find(key);
        if (ita != a.aggregates.end()) {
            row.mean_a = ita->second.mean_foldrun;
            row.sd_a = ita->second.sd_foldrun;
        }
        if (b != nullptr) {
            auto itb = b->aggregates.find(key);
            if (itb != b->aggregates.end()) {
                row.mean_b = itb->second.mean_foldrun;
                row.sd_b = itb->second.sd_foldrun;
            }
            if (row.mean_a && row.mean_b) row.delta = *row.mean_b - *row.mean_a;
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

std::string cell(const std::optional<double>& mean, const std::optional<double>& sd) {
    if (!mean) return "-";
    char buf[48];
    if (sd) {
        std::snprintf(buf, sizeof(buf), "%.3f (+/-%.3f)", *mean, *sd);
    } else {
        std::snprintf(buf, sizeof(buf), "%.3f", *mean);
    }
    return buf;
}

}  // namespace

std::string format_table(const std::vector<TableRow>& rows, const std::string& header_a,
                         const std::string& header_b) {
    const bool two = !header_b.empty();
    std::ostringstream out;
    auto pad = [](const std::string& s, size_t w) {
        return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
    };
    const size_t w0 = 22, w = 20;
    out << pad("Metric (Mean +/- SD)", w0) << "| " << pad(header_a, w);
    if (two) out << "| " << pad(header_b, w) << "| Delta";
    out << "\n";
    out << std::string(w0, '-') << "+" << std::string(w + 1, '-');
    if (two) out << "+" << std::string(w + 1, '-') << "+-------";
    out << "\n";
    for (const auto& row : rows) {
        out << pad(row.label, w0) << "| " << pad(cell(row.mean_a, row.sd_a), w);
        if (two) {
            out << "| " << pad(cell(row.mean_b, row.sd_b), w) << "| ";
            if (row.delta) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%+.3f", *row.delta);
                out << buf;
            } else {
                out << "-";
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace sgp
