#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "random.hpp"
#include "reconstruct.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "temporal_graph.hpp"
#include "trainer.hpp"

namespace deephub {

struct ExperimentSpec {
    std::string dataset_path;
    Binning binning;
    std::vector<SamplingPlan> strategy_grid;  // per-plan seeds are derived, not taken from here
    std::vector<TrainerConfig> trainer_grid;  // same for trainer seeds
    int runs_per_config = 10;
    std::uint64_t master_seed = 42;
    std::string out_dir;
    int threads = 1;
    bool deterministic = true;

    void validate() const {
        if (strategy_grid.empty() || trainer_grid.empty())
            throw std::invalid_argument("experiment: empty grid");
        if (runs_per_config < 1)
            throw std::invalid_argument("experiment: runs_per_config must be >= 1");
        if (out_dir.empty())
            throw std::invalid_argument("experiment: output directory required");
    }
};

struct ConfigResult {
    std::size_t config_index = 0;
    SamplingPlan plan;
    TrainerConfig trainer;
    std::vector<double> run_f1; // last-snapshot micro F1 per run
    double mean_f1 = 0.0;
};

struct ExperimentResult {
    std::vector<ConfigResult> configs;
    std::size_t best_index = 0;
};

/// Per-run seeds are a splittable-hash mix of (master seed, config index,
/// run index), so reordering the grid does not change any run's result.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::size_t config_index, std::size_t run_index) {
    return mix_seed(master_seed, {static_cast<std::uint64_t>(config_index), static_cast<std::uint64_t>(run_index)});
}

namespace detail {

inline nlohmann::ordered_json plan_json(const SamplingPlan& plan) {
    nlohmann::ordered_json j;
    j["strategy"] = strategy_name(plan.strategy);
    j["num_walks_per_node"] = plan.num_walks_per_node;
    j["walk_length"] = plan.walk_length;
    if (plan.strategy == StrategyKind::Node2vec) {
        j["p"] = plan.p;
        j["q"] = plan.q;
    } else if (plan.strategy == StrategyKind::DeepHub) {
        j["p"] = plan.deephub.p;
        j["u"] = plan.deephub.u;
        ScoringKind kind = plan.deephub.inverse
                               ? (plan.deephub.log_scaling ? ScoringKind::InverseLog : ScoringKind::Inverse)
                               : (plan.deephub.log_scaling ? ScoringKind::Log : ScoringKind::Normal);
        j["scoring"] = scoring_name(kind);
    }
    return j;
}

inline nlohmann::ordered_json trainer_json(const TrainerConfig& cfg) {
    nlohmann::ordered_json j;
    j["dimension"] = cfg.dimension;
    j["window"] = cfg.window;
    j["negative_samples"] = cfg.negative_samples;
    j["epochs"] = cfg.epochs;
    j["initial_learning_rate"] = cfg.initial_learning_rate;
    j["min_learning_rate"] = cfg.min_learning_rate;
    return j;
}

inline nlohmann::ordered_json binning_json(const Binning& binning) {
    nlohmann::ordered_json j;
    if (binning.mode == Binning::Mode::FixedCount) {
        j["mode"] = "fixed-count";
        j["count"] = binning.count;
    } else {
        j["mode"] = "fixed-width";
        j["width"] = binning.width;
    }
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

} // namespace detail

/// One embedding + evaluation run; returns the scored sequence.
inline SequenceScore run_once(const SnapshotSequence& seq, SamplingPlan plan, TrainerConfig trainer,
                              std::uint64_t seed, int trainer_threads = 1) {
    plan.seed = mix_seed(seed, 101);
    trainer.seed = mix_seed(seed, 202);
    EmbeddingSequence embeddings = embed_dynamic(seq, plan, trainer, 1, trainer_threads);
    return evaluate_sequence(embeddings, seq);
}

/// Grid search with multi-run averaging. Writes the result bundle to
/// spec.out_dir: bundle.json, configs.csv, runs.csv, and for the best
/// configuration per-node metrics, the stats report, and embedding dumps.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    std::ifstream in(spec.dataset_path);
    if (!in)
        throw std::runtime_error("cannot read dataset " + spec.dataset_path);
    EdgeList edges = parse_edge_stream(in);
    SnapshotSequence seq = bin_snapshots(edges, spec.binning);

    ExperimentResult result;
    for (std::size_t s = 0; s < spec.strategy_grid.size(); ++s)
        for (std::size_t t = 0; t < spec.trainer_grid.size(); ++t) {
            ConfigResult cfg;
            cfg.config_index = result.configs.size();
            cfg.plan = spec.strategy_grid[s];
            cfg.trainer = spec.trainer_grid[t];
            cfg.run_f1.assign(spec.runs_per_config, 0.0);
            result.configs.push_back(std::move(cfg));
        }

    struct Task {
        std::size_t config;
        std::size_t run;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < result.configs.size(); ++c)
        for (int r = 0; r < spec.runs_per_config; ++r)
            tasks.push_back({c, static_cast<std::size_t>(r)});

    const int trainer_threads = spec.deterministic ? 1 : spec.threads;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            auto [c, r] = tasks[i];
            auto& cfg = result.configs[c];
            SequenceScore score = run_once(seq, cfg.plan, cfg.trainer,
                                           run_seed(spec.master_seed, c, r), trainer_threads);
            cfg.run_f1[r] = score.last_snapshot_micro_f1;
        }
    };
    if (spec.threads <= 1 || spec.deterministic == false) {
        // non-deterministic mode parallelizes inside the trainer instead
        worker();
    } else {
        std::vector<std::thread> pool;
        int n_workers = std::min<int>(spec.threads, static_cast<int>(tasks.size()));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    for (auto& cfg : result.configs) {
        double sum = 0;
        for (double f1 : cfg.run_f1)
            sum += f1;
        cfg.mean_f1 = sum / static_cast<double>(cfg.run_f1.size());
        if (cfg.mean_f1 > result.configs[result.best_index].mean_f1)
            result.best_index = cfg.config_index;
    }

    // ---- bundle on disk ----
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);

    nlohmann::ordered_json bundle;
    bundle["dataset"] = fs::path(spec.dataset_path).filename().string();
    bundle["binning"] = detail::binning_json(spec.binning);
    bundle["runs_per_config"] = spec.runs_per_config;
    bundle["master_seed"] = spec.master_seed;
    bundle["num_configs"] = result.configs.size();
    bundle["best_config"] = result.best_index;
    bundle["best_mean_f1"] = result.configs[result.best_index].mean_f1;
    bundle["configs"] = nlohmann::ordered_json::array();
    for (const auto& cfg : result.configs) {
        nlohmann::ordered_json j;
        j["config"] = cfg.config_index;
        j["plan"] = detail::plan_json(cfg.plan);
        j["trainer"] = detail::trainer_json(cfg.trainer);
        j["run_f1"] = cfg.run_f1;
        j["mean_f1"] = cfg.mean_f1;
        bundle["configs"].push_back(j);
    }
    detail::write_text_file(fs::path(spec.out_dir) / "bundle.json", bundle.dump(2) + "\n");

    char buf[256];
    std::string configs_csv = "config,strategy,dim,p,q,u,scoring,walks,walk_length,mean_f1\n";
    std::string runs_csv = "config,run,f1\n";
    for (const auto& cfg : result.configs) {
        const auto& plan = cfg.plan;
        double p = plan.strategy == StrategyKind::DeepHub ? plan.deephub.p : plan.p;
        double q = plan.strategy == StrategyKind::Node2vec ? plan.q : 0.0;
        double u = plan.strategy == StrategyKind::DeepHub ? plan.deephub.u : 0.0;
        std::string scoring = plan.strategy == StrategyKind::DeepHub
                                  ? scoring_name(plan.deephub.inverse
                                                     ? (plan.deephub.log_scaling ? ScoringKind::InverseLog
                                                                                 : ScoringKind::Inverse)
                                                     : (plan.deephub.log_scaling ? ScoringKind::Log
                                                                                 : ScoringKind::Normal))
                                  : "";
        std::snprintf(buf, sizeof(buf), "%zu,%s,%d,%g,%g,%g,%s,%d,%d,%.6f\n", cfg.config_index,
                      strategy_name(plan.strategy).c_str(), cfg.trainer.dimension, p, q, u, scoring.c_str(),
                      plan.num_walks_per_node, plan.walk_length, cfg.mean_f1);
        configs_csv += buf;
        for (std::size_t r = 0; r < cfg.run_f1.size(); ++r) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f\n", cfg.config_index, r, cfg.run_f1[r]);
            runs_csv += buf;
        }
    }
    detail::write_text_file(fs::path(spec.out_dir) / "configs.csv", configs_csv);
    detail::write_text_file(fs::path(spec.out_dir) / "runs.csv", runs_csv);

    // Re-run the winner (run 0 seeds) for the detailed reports.
    const auto& best = result.configs[result.best_index];
    SamplingPlan best_plan = best.plan;
    TrainerConfig best_trainer = best.trainer;
    std::uint64_t seed0 = run_seed(spec.master_seed, best.config_index, 0);
    best_plan.seed = mix_seed(seed0, 101);
    best_trainer.seed = mix_seed(seed0, 202);
    EmbeddingSequence embeddings = embed_dynamic(seq, best_plan, best_trainer, 1, trainer_threads);
    SequenceScore score = evaluate_sequence(embeddings, seq);

    fs::path best_dir = fs::path(spec.out_dir) / "best";
    fs::create_directories(best_dir / "embeddings");
    {
        std::ostringstream metrics;
        write_metrics_csv(metrics, score, seq.labels);
        detail::write_text_file(best_dir / "metrics.csv", metrics.str());
    }
    detail::write_text_file(best_dir / "stats.json",
                            build_stats_report(seq, score.per_snapshot).dump(2) + "\n");
    for (const auto& emb : embeddings) {
        std::snprintf(buf, sizeof(buf), "snapshot_%03d.emb", emb.snapshot_index);
        std::ostringstream dump;
        write_embedding(dump, emb, seq.labels);
        detail::write_text_file(best_dir / "embeddings" / buf, dump.str());
    }
    return result;
}

struct ComparisonRow {
    std::string dataset;
    double baseline_f1 = 0.0;
    double challenger_f1 = 0.0;
    double f1_diff = 0.0;
    double f1_improvement_pct = 0.0;
};

/// Best-vs-best comparison of two result bundles over the same dataset and
/// binning: absolute difference and relative improvement percent.
inline ComparisonRow compare_strategies(const std::string& baseline_dir, const std::string& challenger_dir) {
    auto load = [](const std::string& dir) {
        std::ifstream in(std::filesystem::path(dir) / "bundle.json");
        if (!in)
            throw std::runtime_error("cannot read bundle.json in " + dir);
        return nlohmann::ordered_json::parse(in);
    };
    nlohmann::ordered_json a = load(baseline_dir);
    nlohmann::ordered_json b = load(challenger_dir);
    if (a["dataset"] != b["dataset"] || a["binning"] != b["binning"])
        throw std::invalid_argument("compare_strategies: bundles cover different datasets or binnings");

    ComparisonRow row;
    row.dataset = a["dataset"].get<std::string>();
    row.baseline_f1 = a["best_mean_f1"].get<double>();
    row.challenger_f1 = b["best_mean_f1"].get<double>();
    row.f1_diff = row.challenger_f1 - row.baseline_f1;
    row.f1_improvement_pct = 100.0 * row.f1_diff / row.baseline_f1;
    return row;
}

inline void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
    out << "dataset,baseline_f1,challenger_f1,f1_diff,f1_improvement_pct\n";
    char buf[256];
    for (const auto& row : rows) {
        // diff and improvement are recomputed from the printed (rounded)
        // F1 values so every row is self-consistent at CSV precision
        double base = std::round(row.baseline_f1 * 1e6) / 1e6;
        double chal = std::round(row.challenger_f1 * 1e6) / 1e6;
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.4f\n", row.dataset.c_str(), base, chal,
                      chal - base, 100.0 * (chal - base) / base);
        out << buf;
    }
}

/// Baseline node2vec tuning grid: p, q over {0.25, 0.5, 1, 2, 4}.
inline std::vector<SamplingPlan> baseline_strategy_grid(int walks = 10, int walk_length = 32) {
    const double values[] = {0.25, 0.5, 1, 2, 4};
    std::vector<SamplingPlan> grid;
    for (double p : values)
        for (double q : values) {
            SamplingPlan plan;
            plan.strategy = StrategyKind::Node2vec;
            plan.num_walks_per_node = walks;
            plan.walk_length = walk_length;
            plan.p = p;
            plan.q = q;
            grid.push_back(plan);
        }
    return grid;
}

/// Default DeepHub grid: p, u over {0, 0.15, 0.25, 0.5} x all four scorings.
inline std::vector<SamplingPlan> deephub_strategy_grid(int walks = 10, int walk_length = 32) {
    const double values[] = {0, 0.15, 0.25, 0.5};
    const ScoringKind scorings[] = {ScoringKind::Normal, ScoringKind::Log, ScoringKind::Inverse,
                                    ScoringKind::InverseLog};
    std::vector<SamplingPlan> grid;
    for (double p : values)
        for (double u : values)
            for (ScoringKind scoring : scorings) {
                SamplingPlan plan;
                plan.strategy = StrategyKind::DeepHub;
                plan.num_walks_per_node = walks;
                plan.walk_length = walk_length;
                plan.deephub.p = p;
                plan.deephub.u = u;
                auto flags = to_scoring(scoring);
                plan.deephub.inverse = flags.inverse;
                plan.deephub.log_scaling = flags.log_scaling;
                grid.push_back(plan);
            }
    return grid;
}

/// Trainer grid over the standard ladder of embedding dimensions.
inline std::vector<TrainerConfig> dimension_grid(TrainerConfig base,
                                                 std::span<const int> dims = std::span<const int>{}) {
    static const int default_dims[] = {10, 25, 50, 100, 200};
    std::vector<TrainerConfig> grid;
    auto use = dims.empty() ? std::span<const int>(default_dims) : dims;
    for (int d : use) {
        base.dimension = d;
        grid.push_back(base);
    }
    return grid;
}

} // namespace deephub
