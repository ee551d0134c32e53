// sgp: situation-graph toolkit CLI.
// Subcommands: schema-check, generate, validate, split, run, report.
// Exit codes: 0 success, 1 validation findings, 2 operational error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgp/corpus.hpp"
#include "sgp/harness.hpp"
#include "sgp/http_backends.hpp"
#include "sgp/ontology.hpp"
#include "sgp/synthgen.hpp"

using namespace sgp;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kOperational = 2;

SchemaDef load_schema_or_default(const std::string& path) {
    if (path.empty()) return default_schema();
    if (!std::filesystem::exists(path)) {
        throw SchemaError(path + ": no such file");
    }
    return load_schema_file(path);
}

int cmd_schema_check(const std::string& schema_path) {
    if (!schema_path.empty() && !std::filesystem::exists(schema_path)) {
        std::cerr << "error: " << schema_path << ": no such file\n";
        return kOperational;
    }
    SchemaDef schema;
    try {
        schema = load_schema_or_default(schema_path);
    } catch (const SchemaError& e) {
        std::cout << "schema violation: " << e.what() << "\n";
        return kFindings;
    }
    std::map<Stratum, std::vector<std::string>> by_stratum;
    for (const auto& k : schema.kinds()) by_stratum[k.stratum].push_back(k.id);
    std::cout << "schema ok: " << schema.kinds().size() << " kinds / "
              << schema.predicates().size() << " predicates / " << by_stratum.size()
              << " strata\n";
    for (const auto& [stratum, kinds] : by_stratum) {
        std::cout << "  " << to_string(stratum) << " (" << kinds.size() << "):";
        for (const auto& id : kinds) std::cout << " " << id;
        std::cout << "\n";
    }
    std::cout << "latent predicates:";
    for (const auto& p : schema.predicates()) {
        if (p.latent) std::cout << " " << p.id;
    }
    std::cout << "\nsize bounds: [" << schema.min_triplets() << ", " << schema.max_triplets()
              << "]\nfingerprint: " << schema.fingerprint() << "\n";
    return kOk;
}

int cmd_generate(const std::string& schema_path, const std::string& out_path, int n,
                 int artifacts, uint64_t seed, const std::string& cues_path) {
    SchemaDef schema = load_schema_or_default(schema_path);
    GenConfig cfg = GenConfig::defaults(schema);
    cfg.n_instances = n;
    cfg.artifacts_per_instance = {artifacts, artifacts};
    cfg.seed = seed;
    CueTable cues = CueTable::defaults();
    if (!cues_path.empty()) {
        std::ifstream in(cues_path);
        if (!in) throw GenError(cues_path + ": cannot open cue table");
        std::ostringstream buf;
        buf << in.rdbuf();
        cues = CueTable::from_json(buf.str());
    }
    Corpus corpus = generate_corpus(schema, cfg, default_persona(), cues);
    write_corpus_file(corpus, out_path);
    std::cout << "wrote " << corpus.instances.size() << " instances / "
              << corpus.artifact_count() << " artifacts to " << out_path << "\n";
    return kOk;
}

int cmd_validate(const std::string& corpus_path, const std::string& schema_path) {
    SchemaDef schema = load_schema_or_default(schema_path);
    Corpus corpus = read_corpus_file(corpus_path, &schema);
    size_t findings = 0;
    for (const auto& inst : corpus.instances) {
        for (const auto& v : validate_graph(schema, inst.gold)) {
            std::cout << inst.instance_id << ": " << to_string(v.kind) << ": " << v.message
                      << "\n";
            ++findings;
        }
    }
    std::cout << findings << " findings over " << corpus.instances.size() << " instances\n";
    return findings == 0 ? kOk : kFindings;
}

int cmd_split(const std::string& corpus_path, const std::string& schema_path, int folds,
              double test_fraction, const std::string& stratify_by, uint64_t seed,
              const std::string& out_path) {
    SchemaDef schema = load_schema_or_default(schema_path);
    Corpus corpus = read_corpus_file(corpus_path, &schema);
    if (folds > static_cast<int>(corpus.instances.size())) {
        std::cerr << "error: " << folds << " folds exceed " << corpus.instances.size()
                  << " instances\n";
        return kOperational;
    }
    SplitPlan plan = make_splits(corpus, folds, test_fraction, stratify_by, seed);
    std::map<std::string, std::string> domains;
    for (const auto& inst : corpus.instances) domains[inst.instance_id] = inst.domain;
    for (size_t f = 0; f < plan.folds.size(); ++f) {
        const Fold& fold = plan.folds[f];
        std::map<std::string, int> counts;
        for (const auto& id : fold.test_ids) ++counts[domains[id]];
        std::cout << "fold " << f << ": test " << fold.test_ids.size() << " / retrieval "
                  << fold.retrieval_ids.size() << " |";
        for (const auto& [d, count] : counts) std::cout << " " << d << " " << count;
        std::cout << "\n";
    }
    for (const auto& w : plan.warnings) std::cout << "warning: " << w << "\n";
    if (!out_path.empty()) {
        save_plan(plan, out_path);
        std::cout << "wrote plan to " << out_path << "\n";
    }
    return kOk;
}

struct BackendSpec {
    std::string predictor_type = "oracle";
    NoisyOracleConfig noisy;
    HttpBackendConfig predictor_http;
    std::string embedder_type = "hashing";
    size_t hashing_dimension = 512;
    uint64_t hashing_seed = 0x5367505f686173ULL;
    HttpBackendConfig embedder_http;
};

void apply_backends_config(BackendSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BackendError(path + ": cannot open backends config");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw BackendError(path + ": not a JSON object");
    }
    auto http_from = [](const json& j, HttpBackendConfig& cfg) {
        cfg.base_url = j.value("base_url", cfg.base_url);
        cfg.path = j.value("path", cfg.path);
        cfg.model = j.value("model", cfg.model);
        cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
        cfg.max_retries = j.value("max_retries", cfg.max_retries);
        cfg.temperature = j.value("temperature", cfg.temperature);
        cfg.embedding_dimension = j.value("embedding_dimension", cfg.embedding_dimension);
        cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    };
    if (doc.contains("predictor")) {
        const json& jp = doc.at("predictor");
        spec.predictor_type = jp.value("type", spec.predictor_type);
        spec.noisy.drop_rate_surface = jp.value("drop_rate_surface", 0.0);
        spec.noisy.drop_rate_latent = jp.value("drop_rate_latent", 0.0);
        spec.noisy.corrupt_rate = jp.value("corrupt_rate", 0.0);
        spec.noisy.hallucinate_rate = jp.value("hallucinate_rate", 0.0);
        spec.noisy.seed = jp.value("seed", uint64_t{0});
        spec.noisy.exact_invalid_numer = jp.value("exact_invalid_numer", 0);
        spec.noisy.exact_invalid_denom = jp.value("exact_invalid_denom", 0);
        http_from(jp, spec.predictor_http);
    }
    if (doc.contains("embedder")) {
        const json& je = doc.at("embedder");
        spec.embedder_type = je.value("type", spec.embedder_type);
        spec.hashing_dimension = je.value("dimension", spec.hashing_dimension);
        spec.hashing_seed = je.value("seed", spec.hashing_seed);
        http_from(je, spec.embedder_http);
    }
}

int cmd_run(const std::string& corpus_path, const std::string& schema_path,
            const std::string& plan_path, const std::string& protocol_name,
            const std::string& task_mode_name, int k, double tau, int runs, uint64_t seed,
            int context_window, const std::string& entropy_mode_name, int jobs,
            const std::string& backend_override, const std::string& backends_config_path,
            const std::string& out_path) {
    SchemaDef schema = load_schema_or_default(schema_path);
    Corpus corpus = read_corpus_file(corpus_path, &schema);
    SplitPlan plan = plan_path.empty() ? make_splits(corpus, 5, 0.2, "domain", seed)
                                       : load_plan(plan_path);

    ProtocolConfig cfg;
    auto protocol = protocol_from_string(protocol_name);
    if (!protocol) throw HarnessError("unknown protocol '" + protocol_name + "'");
    cfg.protocol = *protocol;
    auto mode = task_mode_from_string(task_mode_name);
    if (!mode) throw HarnessError("unknown task mode '" + task_mode_name + "'");
    cfg.task_mode = *mode;
    auto entropy_mode = entropy_mode_from_string(entropy_mode_name);
    if (!entropy_mode) throw HarnessError("unknown entropy mode '" + entropy_mode_name + "'");
    cfg.entropy_mode = *entropy_mode;
    cfg.k = k;
    cfg.tau = tau;
    cfg.runs_per_fold = runs;
    cfg.seed = seed;
    cfg.context_window = context_window;

    BackendSpec spec;
    if (!backends_config_path.empty()) apply_backends_config(spec, backends_config_path);
    if (!backend_override.empty()) spec.predictor_type = backend_override;

    std::unique_ptr<TextGenerator> predictor;
    if (spec.predictor_type == "oracle") {
        predictor = std::make_unique<OracleGenerator>(corpus);
    } else if (spec.predictor_type == "noisy_oracle" ||
               spec.predictor_type == "noisy-oracle") {
        predictor = std::make_unique<NoisyOracleGenerator>(corpus, schema, spec.noisy);
    } else if (spec.predictor_type == "http") {
        predictor = std::make_unique<HttpGenerator>(spec.predictor_http);
    } else {
        throw BackendError("unknown predictor type '" + spec.predictor_type + "'");
    }
    std::unique_ptr<Embedder> embedder;
    if (spec.embedder_type == "hashing") {
        embedder =
            std::make_unique<HashingEmbedder>(spec.hashing_dimension, spec.hashing_seed);
    } else if (spec.embedder_type == "http") {
        embedder = std::make_unique<HttpEmbedder>(spec.embedder_http);
    } else {
        throw BackendError("unknown embedder type '" + spec.embedder_type + "'");
    }

    RunBackends backends{predictor.get(), embedder.get(), nullptr};
    EvalReport report = run_experiment(corpus, schema, plan, cfg, backends, jobs);
    save_report(report, out_path);
    std::cout << "wrote report to " << out_path << " (" << report.records.size()
              << " records, " << report.n_errored << " errored)\n";
    std::cout << format_table(table_model(report), std::string(to_string(cfg.protocol)));
    return kOk;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& format) {
    if (paths.empty() || paths.size() > 2) {
        std::cerr << "error: report takes one or two report files\n";
        return kOperational;
    }
    EvalReport a = load_report(paths[0]);
    std::optional<EvalReport> b;
    if (paths.size() == 2) b = load_report(paths[1]);
    if (format == "json") {
        json out = json::parse(report_to_json(a));
        if (b) out = json{{"first", out}, {"second", json::parse(report_to_json(*b))}};
        std::cout << out.dump(2) << "\n";
        return kOk;
    }
    const std::string header_a(to_string(a.config.protocol));
    if (b) {
        std::cout << format_table(table_model(a, &*b), header_a,
                                  std::string(to_string(b->config.protocol)));
    } else {
        std::cout << format_table(table_model(a), header_a);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"situation-graph prediction toolkit"};
    app.require_subcommand(1);

    std::string schema_path, corpus_path, plan_path, out_path, cues_path;
    std::string backends_config_path, backend_override;
    std::string protocol = "zero_shot", task_mode = "static", stratify_by = "domain";
    std::string entropy_mode = "pooled", format = "table";
    std::vector<std::string> report_paths;
    int n = 75, artifacts = 3, folds = 5, k = 3, runs = 3, jobs = 1, context_window = 1;
    double tau = 0.5, test_fraction = 0.2;
    uint64_t seed = 0;

    auto* sc_schema = app.add_subcommand("schema-check", "validate a schema file");
    sc_schema->add_option("--schema", schema_path, "schema file (default: built-in)");

    auto* sc_generate = app.add_subcommand("generate", "generate a synthetic corpus");
    sc_generate->add_option("--schema", schema_path, "schema file");
    sc_generate->add_option("--out", out_path, "corpus output path")->required();
    sc_generate->add_option("--n", n, "number of instances");
    sc_generate->add_option("--artifacts", artifacts, "artifacts per instance");
    sc_generate->add_option("--seed", seed, "generation seed");
    sc_generate->add_option("--cues", cues_path, "cue table file");

    auto* sc_validate = app.add_subcommand("validate", "validate corpus gold graphs");
    sc_validate->add_option("--corpus", corpus_path, "corpus file")->required();
    sc_validate->add_option("--schema", schema_path, "schema file");

    auto* sc_split = app.add_subcommand("split", "build a stratified CV split plan");
    sc_split->add_option("--corpus", corpus_path, "corpus file")->required();
    sc_split->add_option("--schema", schema_path, "schema file");
    sc_split->add_option("--folds", folds, "number of folds");
    sc_split->add_option("--test-fraction", test_fraction, "test fraction");
    sc_split->add_option("--stratify-by", stratify_by, "stratification field");
    sc_split->add_option("--seed", seed, "shuffle seed");
    sc_split->add_option("--out", out_path, "plan output path");

    auto* sc_run = app.add_subcommand("run", "run an evaluation protocol");
    sc_run->add_option("--corpus", corpus_path, "corpus file")->required();
    sc_run->add_option("--schema", schema_path, "schema file");
    sc_run->add_option("--plan", plan_path, "split plan (default: 5-fold from seed)");
    sc_run->add_option("--protocol", protocol, "zero_shot | ra_icl");
    sc_run->add_option("--task-mode", task_mode,
                       "static | temporal_oracle | temporal_autoregressive");
    sc_run->add_option("--k", k, "demonstrations per query");
    sc_run->add_option("--tau", tau, "soft-match threshold");
    sc_run->add_option("--runs", runs, "runs per fold");
    sc_run->add_option("--seed", seed, "run seed");
    sc_run->add_option("--context-window", context_window, "history length");
    sc_run->add_option("--entropy-mode", entropy_mode, "pooled | per_kind | uniform");
    sc_run->add_option("--jobs", jobs, "parallel fold-run tasks");
    sc_run->add_option("--backend", backend_override, "oracle | noisy_oracle | http");
    sc_run->add_option("--backends-config", backends_config_path, "backends config JSON");
    sc_run->add_option("--out", out_path, "report output path")->required();

    auto* sc_report = app.add_subcommand("report", "render report summaries");
    sc_report->add_option("reports", report_paths, "one or two report files")->required();
    sc_report->add_option("--format", format, "table | json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_schema->parsed()) return cmd_schema_check(schema_path);
        if (sc_generate->parsed()) {
            return cmd_generate(schema_path, out_path, n, artifacts, seed, cues_path);
        }
        if (sc_validate->parsed()) return cmd_validate(corpus_path, schema_path);
        if (sc_split->parsed()) {
            return cmd_split(corpus_path, schema_path, folds, test_fraction, stratify_by,
                             seed, out_path);
        }
        if (sc_run->parsed()) {
            return cmd_run(corpus_path, schema_path, plan_path, protocol, task_mode, k, tau,
                           runs, seed, context_window, entropy_mode, jobs, backend_override,
                           backends_config_path, out_path);
        }
        if (sc_report->parsed()) return cmd_report(report_paths, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOperational;
    }
    return kOperational;
}
