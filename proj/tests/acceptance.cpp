// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Everything runs offline with pinned seeds and tolerances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgp/harness.hpp"
#include "sgp/metrics.hpp"
#include "sgp/ontology.hpp"
#include "sgp/retrieval.hpp"
#include "sgp/synthgen.hpp"

using namespace sgp;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void run_criterion(int id, const std::string& name, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome.passed = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] %2d. %s: %s (%.1fs)",
                  outcome.passed ? "PASS" : "FAIL", id, name.c_str(),
                  outcome.detail.c_str(), secs);
    std::cout << line << std::endl;
    if (!outcome.passed) ++failures;
}

Corpus make_corpus(uint64_t seed, int n) {
    GenConfig cfg = GenConfig::defaults(default_schema());
    cfg.seed = seed;
    cfg.n_instances = n;
    return generate_corpus(default_schema(), cfg, default_persona());
}

std::vector<Triplet> predict(TextGenerator& gen, const Instance& inst, uint64_t seed) {
    GenParams params;
    params.instance_id = inst.instance_id;
    params.seed = seed;
    return parse_prediction(gen.generate("", params)).triplets;
}

// ---- criteria -------------------------------------------------------------

Outcome generator_soundness() {
    const SchemaDef& schema = default_schema();
    GenConfig cfg = GenConfig::defaults(schema);
    std::set<std::string> kinds_seen;
    size_t violations = 0;
    int lo = schema.max_triplets() + 1, hi = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 10000; ++i) {
        Rng rng(derive_seed({2024, static_cast<uint64_t>(i)}));
        SituationGraph g = sample_graph(schema, cfg, rng, "professional", i, "a");
        violations += validate_graph(schema, g).size();
        const int n = static_cast<int>(g.triplets.size());
        lo = std::min(lo, n);
        hi = std::max(hi, n);
        for (const auto& t : g.triplets) {
            kinds_seen.insert(t.subject.kind);
            kinds_seen.insert(t.object.kind);
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = violations == 0 && lo >= schema.min_triplets() &&
                    hi <= schema.max_triplets() &&
                    kinds_seen.size() == schema.kinds().size() && secs < 30.0;
    std::ostringstream detail;
    detail << "10000 graphs, " << violations << " violations, sizes " << lo << ".." << hi
           << ", " << kinds_seen.size() << "/" << schema.kinds().size() << " kinds";
    return {ok, detail.str()};
}

Outcome oracle_ceiling() {
    Corpus corpus = make_corpus(42, 75);
    const SchemaDef& schema = default_schema();
    SplitPlan plan = make_splits(corpus, 5, 0.2, "domain", 7);
    OracleGenerator oracle(corpus);
    HashingEmbedder embedder;
    RunBackends backends{&oracle, &embedder, nullptr};

    struct ModeSpec {
        Protocol protocol;
        TaskMode mode;
    };
    const std::vector<ModeSpec> modes = {
        {Protocol::zero_shot, TaskMode::static_mode},
        {Protocol::ra_icl, TaskMode::static_mode},
        {Protocol::zero_shot, TaskMode::temporal_oracle},
        {Protocol::zero_shot, TaskMode::temporal_autoregressive},
    };
    size_t checked = 0;
    for (const auto& spec : modes) {
        ProtocolConfig cfg;
        cfg.protocol = spec.protocol;
        cfg.task_mode = spec.mode;
        cfg.k = 3;
        cfg.context_window = 2;
        cfg.seed = 5;
        EvalReport report = run_experiment(corpus, schema, plan, cfg, backends, 4);
        if (report.n_errored != 0) return {false, "errored instances in oracle run"};
        for (const auto& rec : report.records) {
            if (rec.metrics.strict.f1 != 1.0 || rec.metrics.soft.f1 != 1.0 ||
                rec.metrics.pvr != 0.0 || rec.metrics.gap_ls != 0.0) {
                return {false, "non-exact ceiling under " +
                                   std::string(to_string(spec.protocol)) + "/" +
                                   std::string(to_string(spec.mode)) + " at " +
                                   rec.instance_id};
            }
            ++checked;
        }
    }
    return {true, "strict=soft=1.000, pvr=0.000, gap=0.000 exact over " +
                      std::to_string(checked) + " records in 4 modes"};
}

Outcome noise_calibration() {
    Corpus corpus = make_corpus(43, 150);
    const SchemaDef& schema = default_schema();
    NoisyOracleConfig noisy;
    noisy.drop_rate_surface = 0.3;
    noisy.drop_rate_latent = 0.3;
    noisy.seed = 17;
    NoisyOracleGenerator gen(corpus, schema, noisy);

    size_t gold_total = 0, tp_total = 0;
    bool precision_exact = true;
    for (const auto& inst : corpus.instances) {
        const auto pred = predict(gen, inst, fnv1a64(inst.instance_id));
        const std::set<Triplet> gold(inst.gold.triplets.begin(), inst.gold.triplets.end());
        for (const auto& t : pred) {
            if (!gold.count(t)) precision_exact = false;
        }
        std::set<Triplet> pred_set(pred.begin(), pred.end());
        gold_total += gold.size();
        for (const auto& t : gold) tp_total += pred_set.count(t);
    }
    const double recall = static_cast<double>(tp_total) / static_cast<double>(gold_total);
    const bool ok = gold_total >= 1500 && precision_exact && std::abs(recall - 0.70) <= 0.05;
    std::ostringstream detail;
    detail << "recall " << recall << " over " << gold_total
           << " gold triplets, precision exact=" << (precision_exact ? "yes" : "no");
    return {ok, detail.str()};
}

Outcome pvr_exactness() {
    Corpus corpus = make_corpus(44, 75);
    const SchemaDef& schema = default_schema();
    NoisyOracleConfig noisy;
    noisy.exact_invalid_numer = 1;
    noisy.exact_invalid_denom = 5;
    noisy.seed = 19;
    NoisyOracleGenerator gen(corpus, schema, noisy);
    double worst = 0.0;
    for (const auto& inst : corpus.instances) {
        const auto pred = predict(gen, inst, fnv1a64(inst.instance_id));
        worst = std::max(worst, std::abs(pvr(pred, schema) - 0.200));
    }
    std::ostringstream detail;
    detail << "max |pvr - 0.200| = " << worst << " over 75 instances";
    return {worst <= 1e-9, detail.str()};
}

Outcome soft_strict_equivalence() {
    const SchemaDef& schema = default_schema();
    IndicatorEmbedder embedder;
    Rng rng(123);
    auto random_triplets = [&](size_t max_n) {
        std::vector<Triplet> out;
        const size_t n = rng.bounded(max_n + 1);
        for (size_t i = 0; i < n; ++i) {
            const auto& p = schema.predicates()[rng.bounded(schema.predicates().size())];
            const auto& ks = schema.kinds()[rng.bounded(schema.kinds().size())];
            const auto& ko = schema.kinds()[rng.bounded(schema.kinds().size())];
            out.push_back(Triplet(Node(ks.id, rng.pick(ks.vocabulary)), p.id,
                                  Node(ko.id, rng.pick(ko.vocabulary))));
        }
        return out;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pred = random_triplets(12);
        const auto gold = random_triplets(12);
        const PRF strict = strict_prf(pred, gold);
        const PRF soft = soft_prf(pred, gold, embedder, 0.5);
        worst = std::max({worst, std::abs(strict.precision - soft.precision),
                          std::abs(strict.recall - soft.recall),
                          std::abs(strict.f1 - soft.f1)});
    }
    std::ostringstream detail;
    detail << "max |soft - strict| = " << worst << " over 1000 pairs";
    return {worst <= 1e-9, detail.str()};
}

Outcome assignment_optimality() {
    Rng rng(321);
    size_t exact = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const size_t rows = 1 + rng.bounded(6);
        const size_t cols = 1 + rng.bounded(6);
        std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
        for (auto& row : w) {
            for (auto& v : row) v = rng.real();
        }
        const Assignment a = max_weight_assignment(w);

        // Brute force: every injection of rows into padded columns.
        const size_t n = std::max(rows, cols);
        std::vector<size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 0.0;
        do {
            double mass = 0.0;
            for (size_t i = 0; i < rows; ++i) {
                if (perm[i] < cols) mass += w[i][perm[i]];
            }
            best = std::max(best, mass);
        } while (std::next_permutation(perm.begin(), perm.end()));

        exact += a.mass == best ? 1 : 0;
    }
    return {exact == 500, std::to_string(exact) + "/500 matrices match brute force exactly"};
}

Outcome entropy_arithmetic() {
    std::map<std::string, size_t> latent, surface;
    for (int i = 0; i < 8; ++i) latent["v" + std::to_string(i)] = 1;
    for (int i = 0; i < 106; ++i) surface["v" + std::to_string(i)] = 1;
    const double h8 = shannon_entropy(latent);
    const double h106 = shannon_entropy(surface);
    const auto f1_star = entropy_normalized_f1(0.5, 3.0, 6.7279);
    const bool ok = std::abs(h8 - 3.0) <= 1e-9 && std::abs(h106 - 6.7279) <= 1e-4 &&
                    f1_star.has_value() && std::abs(*f1_star - 0.22295) <= 1e-4;
    std::ostringstream detail;
    detail << "H(8)=" << h8 << ", H(106)=" << h106 << ", F1*=" << (f1_star ? *f1_star : -1);
    return {ok, detail.str()};
}

Outcome gap_directionality() {
    const SchemaDef& schema = default_schema();
    int positive = 0;
    for (uint64_t rep = 0; rep < 100; ++rep) {
        Corpus corpus = make_corpus(1000 + rep, 75);
        SplitPlan plan = make_splits(corpus, 5, 0.2, "domain", rep);
        NoisyOracleConfig noisy;
        noisy.drop_rate_latent = 0.5;
        noisy.seed = rep;
        NoisyOracleGenerator gen(corpus, schema, noisy);
        HashingEmbedder embedder;
        ProtocolConfig cfg;
        cfg.runs_per_fold = 1;
        cfg.seed = rep;
        RunBackends backends{&gen, &embedder, nullptr};
        EvalReport report = run_experiment(corpus, schema, plan, cfg, backends, 4);
        if (report.aggregates.at("gap_ls").mean > 0.0) ++positive;
    }
    return {positive >= 95,
            "aggregate gap > 0 in " + std::to_string(positive) + "/100 replications"};
}

Outcome split_integrity() {
    Corpus corpus = make_corpus(45, 75);
    SplitPlan plan = make_splits(corpus, 5, 0.2, "domain", 11);
    SplitPlan again = make_splits(corpus, 5, 0.2, "domain", 11);
    if (plan_to_json(plan) != plan_to_json(again)) {
        return {false, "same seed produced different plans"};
    }
    std::map<std::string, std::string> domains;
    std::map<std::string, int> totals;
    for (const auto& inst : corpus.instances) {
        domains[inst.instance_id] = inst.domain;
        ++totals[inst.domain];
    }
    std::map<std::string, int> tested;
    for (const auto& fold : plan.folds) {
        if (fold.test_ids.size() != 15 || fold.retrieval_ids.size() != 60) {
            return {false, "fold sizes not 15/60"};
        }
        std::map<std::string, int> counts;
        for (const auto& id : fold.test_ids) {
            ++tested[id];
            ++counts[domains[id]];
        }
        for (const auto& [domain, total] : totals) {
            if (std::abs(counts[domain] - total / 5.0) > 1.0) {
                return {false, "fold domain count off by more than 1 for " + domain};
            }
        }
    }
    if (tested.size() != 75) return {false, "not every instance tested"};
    for (const auto& [id, n] : tested) {
        if (n != 1) return {false, id + " tested " + std::to_string(n) + " times"};
    }
    return {true, "5 folds of 15/60, each instance tested once, strata within 1"};
}

Outcome no_leak() {
    const SchemaDef& schema = default_schema();
    size_t checks = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Corpus corpus = make_corpus(2000 + seed, 75);
        SplitPlan plan = make_splits(corpus, 5, 0.2, "domain", seed);
        OracleGenerator oracle(corpus);
        HashingEmbedder embedder;
        ProtocolConfig cfg;
        cfg.protocol = Protocol::ra_icl;
        cfg.k = 3;
        cfg.seed = seed;
        RunBackends backends{&oracle, &embedder, nullptr};
        EvalReport report = run_experiment(corpus, schema, plan, cfg, backends, 4);
        if (report.n_errored != 0) return {false, "errored instances"};
        checks += report.n_leak_checks;
    }
    return {checks == 10 * 75 * 3,
            "assertion armed on " + std::to_string(checks) + " demonstrations, never fired"};
}

Outcome table_arithmetic() {
    auto synthetic = [](double strict, double soft, double latent, double surface) {
        EvalReport r;
        InstanceRecord rec;
        rec.metrics.strict = PRF{strict, strict, strict};
        rec.metrics.soft = PRF{soft, soft, soft};
        rec.metrics.soft_latent = PRF{latent, latent, latent};
        rec.metrics.soft_surface = PRF{surface, surface, surface};
        rec.metrics.gap_ls = latent_surface_gap(surface, latent);
        r.records.push_back(rec);
        r.aggregates = aggregate(r.records);
        return r;
    };
    EvalReport zero_shot = synthetic(0.016, 0.145, 0.145, 0.143);
    EvalReport ra_icl = synthetic(0.163, 0.424, 0.351, 0.464);
    auto rows = table_model(zero_shot, &ra_icl);
    double strict_delta = 0, soft_delta = 0, gap = 0;
    for (const auto& row : rows) {
        if (row.key == "strict_f1") strict_delta = row.delta.value_or(-9);
        if (row.key == "soft_f1") soft_delta = row.delta.value_or(-9);
        if (row.key == "gap_ls") gap = row.mean_b.value_or(-9);
    }
    const bool ok = std::abs(strict_delta - 0.147) <= 0.001 &&
                    std::abs(soft_delta - 0.279) <= 0.001 && std::abs(gap - 0.113) <= 0.001;
    std::ostringstream detail;
    detail << "delta strict " << strict_delta << ", delta soft " << soft_delta << ", gap "
           << gap;
    return {ok, detail.str()};
}

Outcome end_to_end_determinism() {
    const SchemaDef& schema = default_schema();
    Corpus corpus = make_corpus(46, 75);
    SplitPlan plan = make_splits(corpus, 5, 0.2, "domain", 3);
    NoisyOracleConfig noisy;
    noisy.drop_rate_latent = 0.4;
    noisy.drop_rate_surface = 0.2;
    noisy.hallucinate_rate = 0.15;
    noisy.seed = 99;
    ProtocolConfig cfg;
    cfg.protocol = Protocol::ra_icl;
    cfg.k = 3;
    cfg.runs_per_fold = 3;
    cfg.seed = 21;

    const auto tmp = std::filesystem::temp_directory_path();
    const std::string path1 = (tmp / "sgp_accept_jobs1.json").string();
    const std::string path8 = (tmp / "sgp_accept_jobs8.json").string();

    NoisyOracleGenerator gen1(corpus, schema, noisy);
    HashingEmbedder emb1;
    RunBackends b1{&gen1, &emb1, nullptr};
    save_report(run_experiment(corpus, schema, plan, cfg, b1, 1), path1);

    NoisyOracleGenerator gen8(corpus, schema, noisy);
    HashingEmbedder emb8;
    RunBackends b8{&gen8, &emb8, nullptr};
    save_report(run_experiment(corpus, schema, plan, cfg, b8, 8), path8);

    std::ifstream f1(path1, std::ios::binary), f8(path8, std::ios::binary);
    std::ostringstream s1, s8;
    s1 << f1.rdbuf();
    s8 << f8.rdbuf();
    std::filesystem::remove(path1);
    std::filesystem::remove(path8);
    const bool ok = !s1.str().empty() && s1.str() == s8.str();
    return {ok, ok ? "jobs=1 and jobs=8 report files byte-identical ("
                         + std::to_string(s1.str().size()) + " bytes)"
                   : "report files differ"};
}

}  // namespace

int main() {
    run_criterion(1, "generator soundness", generator_soundness);
    run_criterion(2, "oracle ceiling", oracle_ceiling);
    run_criterion(3, "noise calibration", noise_calibration);
    run_criterion(4, "pvr exactness", pvr_exactness);
    run_criterion(5, "soft/strict oracle equivalence", soft_strict_equivalence);
    run_criterion(6, "assignment optimality", assignment_optimality);
    run_criterion(7, "entropy arithmetic", entropy_arithmetic);
    run_criterion(8, "gap directionality", gap_directionality);
    run_criterion(9, "split integrity", split_integrity);
    run_criterion(10, "no-leak assertion", no_leak);
    run_criterion(11, "summary delta arithmetic", table_arithmetic);
    run_criterion(12, "end-to-end determinism", end_to_end_determinism);

    if (failures == 0) {
        std::cout << "acceptance: 12/12 criteria passed" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << (12 - failures) << "/12 criteria passed, " << failures
              << " FAILED" << std::endl;
    return 1;
}
