#pragma once
// Experiment orchestration: stratified CV splits, the zero-shot and RA-ICL
// protocols, temporal task modes, deterministic parallel execution, metric
// aggregation and report emission.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgp/backends.hpp"
#include "sgp/corpus.hpp"
#include "sgp/decompose.hpp"
#include "sgp/metrics.hpp"

namespace sgp {

struct HarnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Fold {
    std::vector<std::string> retrieval_ids;
    std::vector<std::string> test_ids;  // ascending time order
};

struct SplitPlan {
    std::vector<Fold> folds;
    std::string stratify_by = "domain";
    uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Partitions the corpus into `folds` disjoint test sets covering every
// instance exactly once, with per-fold stratum counts within one of
// proportionality. Deterministic under seed.
SplitPlan make_splits(const Corpus& corpus, int folds = 5, double test_fraction = 0.2,
                      const std::string& stratify_by = "domain", uint64_t seed = 0);

std::string plan_to_json(const SplitPlan& plan);
SplitPlan plan_from_json(const std::string& text);
void save_plan(const SplitPlan& plan, const std::string& path);
SplitPlan load_plan(const std::string& path);

enum class Protocol { zero_shot, ra_icl };
enum class TaskMode { static_mode, temporal_oracle, temporal_autoregressive };

std::string_view to_string(Protocol p);
std::string_view to_string(TaskMode m);
std::optional<Protocol> protocol_from_string(std::string_view s);
std::optional<TaskMode> task_mode_from_string(std::string_view s);

struct ProtocolConfig {
    Protocol protocol = Protocol::zero_shot;
    int k = 3;  // demonstrations for ra_icl
    TaskMode task_mode = TaskMode::static_mode;
    int context_window = 1;  // history length for temporal modes
    int runs_per_fold = 3;
    double tau = 0.5;
    uint64_t seed = 0;
    EntropyMode entropy_mode = EntropyMode::pooled;
};

struct Demonstration {
    std::string bundle_text;
    std::vector<Triplet> gold;
};

std::string schema_prompt_block(const SchemaDef& schema);

// Deterministic prompt: schema, history (oldest first), demonstrations in
// retrieval-rank order, the query bundle, then the output-format instruction.
std::string build_prompt(const SchemaDef& schema, const std::string& query_bundle_text,
                         const std::vector<Demonstration>& demonstrations,
                         const std::vector<SituationGraph>& history);

struct ParseResult {
    std::vector<Triplet> triplets;  // deduplicated, canonical
    int parse_failures = 0;
};

// Total function over the output grammar
// `subject_kind:subject_name | predicate | object_kind:object_name`; malformed
// lines are counted and skipped, never schema-filtered.
ParseResult parse_prediction(const std::string& raw);

struct RunBackends {
    TextGenerator* predictor = nullptr;
    Embedder* embedder = nullptr;
    const EncoderSet* encoders = nullptr;  // offline_encoders() when null
};

struct InstanceRecord {
    int fold = 0;
    int run = 0;
    std::string instance_id;
    MetricRecord metrics;
    int parse_failures = 0;
    int history_gold_fallbacks = 0;
    bool errored = false;
    std::string error;
};

struct AggregateEntry {
    double mean = 0.0;          // over all instance records
    double mean_foldrun = 0.0;  // mean of per-(fold,run) means
    double sd_foldrun = 0.0;    // sample SD over (fold,run) means
    double sd_instance = 0.0;   // sample SD over instance records
    size_t n_records = 0;
};

struct EvalReport {
    ProtocolConfig config;
    std::string schema_fingerprint;
    std::string predictor_fingerprint;
    std::string embedder_fingerprint;
    uint64_t plan_seed = 0;
    EntropyContext entropy;
    std::vector<InstanceRecord> records;
    std::map<std::string, AggregateEntry> aggregates;
    size_t n_errored = 0;
    size_t n_leak_checks = 0;
    bool empty_summary = false;  // every instance errored
};

// Runs every (fold, run, test instance) cell: decompose, retrieve (RA-ICL,
// fold's retrieval split only), build prompt, predict, parse, score. A
// demonstration drawn from the active test fold is a fatal HarnessError.
EvalReport run_experiment(const Corpus& corpus, const SchemaDef& schema,
                          const SplitPlan& plan, const ProtocolConfig& cfg,
                          const RunBackends& backends, int jobs = 1);

// Recomputes the aggregate table from per-instance records.
std::map<std::string, AggregateEntry> aggregate(const std::vector<InstanceRecord>& records);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
void save_report(const EvalReport& report, const std::string& path);  // atomic
EvalReport load_report(const std::string& path);

// Two-column summary table; the second report adds a delta column
// (second mean - first mean, fold/run-level means).
struct TableRow {
    std::string label;
    std::string key;
    std::optional<double> mean_a, sd_a;
    std::optional<double> mean_b, sd_b;
    std::optional<double> delta;
};

std::vector<TableRow> table_model(const EvalReport& a, const EvalReport* b = nullptr);
std::string format_table(const std::vector<TableRow>& rows, const std::string& header_a,
                         const std::string& header_b = "");

}  // namespace sgp
