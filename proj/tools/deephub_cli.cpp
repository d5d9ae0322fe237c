// Experiment runner for hub-aware dynamic graph embeddings. Subcommands
// cover the full pipeline: ingest a temporal edge list, embed with one
// configuration, tune over a hyperparameter grid, evaluate embedding dumps,
// run the statistical analyses, and compare two tuning bundles.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deephub/deephub.hpp"

namespace fs = std::filesystem;
using namespace deephub;

namespace {

struct CommonArgs {
    std::string dataset;
    int snapshots = 0;
    std::int64_t width = 0;
    std::uint64_t seed = 42;
    int threads = 1;
    bool deterministic = true;
};

void add_binning_flags(CLI::App* cmd, CommonArgs& args) {
    auto* snaps = cmd->add_option("--snapshots", args.snapshots, "Bin into N equal-width snapshots");
    auto* width = cmd->add_option("--width", args.width, "Bin into fixed-width snapshots (seconds)");
    snaps->excludes(width);
    width->excludes(snaps);
}

Binning binning_from(const CommonArgs& args) {
    if (args.width > 0)
        return Binning::fixed_width(args.width);
    if (args.snapshots > 0)
        return Binning::fixed_count(args.snapshots);
    throw CLI::ValidationError("--snapshots or --width is required");
}

SnapshotSequence load_sequence(const CommonArgs& args, EdgeList* edges_out = nullptr) {
    std::ifstream in(args.dataset);
    if (!in)
        throw CLI::ValidationError("cannot read dataset " + args.dataset);
    EdgeList edges = parse_edge_stream(in);
    SnapshotSequence seq = bin_snapshots(edges, binning_from(args));
    if (edges_out)
        *edges_out = std::move(edges);
    return seq;
}

SamplingPlan plan_from(const std::string& strategy, double p, double q, double u,
                       const std::string& scoring, int walks, int walk_length) {
    SamplingPlan plan;
    plan.strategy = strategy_from_name(strategy);
    plan.num_walks_per_node = walks;
    plan.walk_length = walk_length;
    if (plan.strategy == StrategyKind::Node2vec) {
        plan.p = p;
        plan.q = q;
    } else if (plan.strategy == StrategyKind::DeepHub) {
        plan.deephub.p = p;
        plan.deephub.u = u;
        auto flags = to_scoring(scoring_from_name(scoring));
        plan.deephub.inverse = flags.inverse;
        plan.deephub.log_scaling = flags.log_scaling;
    }
    return plan;
}

int cmd_ingest(const CommonArgs& args, const std::string& dump_dir) {
    SnapshotSequence seq = load_sequence(args);
    DatasetStats stats = dataset_stats(seq);
    std::printf("dataset           %s\n", fs::path(args.dataset).filename().c_str());
    std::printf("nodes |V|         %zu\n", stats.total_nodes);
    std::printf("edges |E|         %zu\n", stats.total_edges);
    std::printf("snapshots         %zu\n", stats.num_snapshots);
    std::printf("a(V)              %.2f\n", stats.avg_node_activation);
    std::printf("a(E)              %.2f\n", stats.avg_edge_activation);
    for (std::size_t i = 0; i < seq.snapshots.size(); ++i)
        std::printf("  snapshot %-3d    %zu nodes, %zu edges\n", seq.snapshots[i].index,
                    stats.nodes_per_snapshot[i], stats.edges_per_snapshot[i]);
    if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        for (std::size_t i = 0; i < seq.snapshots.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%03d.edges", seq.snapshots[i].index);
            std::ofstream out(fs::path(dump_dir) / name);
            dump_snapshot_edges(out, seq, i);
        }
        std::printf("snapshot edge lists written to %s\n", dump_dir.c_str());
    }
    return 0;
}

int cmd_embed(const CommonArgs& args, const SamplingPlan& plan_in, const TrainerConfig& trainer_in,
              const std::string& out_dir, const std::string& walks_dump) {
    SnapshotSequence seq = load_sequence(args);
    SamplingPlan plan = plan_in;
    TrainerConfig trainer = trainer_in;
    plan.seed = mix_seed(args.seed, 101);
    trainer.seed = mix_seed(args.seed, 202);

    if (!walks_dump.empty()) {
        WalkCorpus corpus = sample_walks(seq.snapshots.front(), seq.snapshots.front().nodes, plan,
                                         args.threads);
        std::ofstream out(walks_dump);
        dump_walks(out, corpus, seq.labels);
        std::printf("snapshot-1 walk corpus (%zu walks) written to %s\n", corpus.walks.size(),
                    walks_dump.c_str());
    }

    int trainer_threads = args.deterministic ? 1 : args.threads;
    EmbeddingSequence embeddings = embed_dynamic(seq, plan, trainer, args.threads, trainer_threads);

    fs::create_directories(out_dir);
    for (const auto& emb : embeddings) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%03d.emb", emb.snapshot_index);
        std::ofstream out(fs::path(out_dir) / name);
        write_embedding(out, emb, seq.labels);
    }
    SequenceScore score = evaluate_sequence(embeddings, seq);
    std::printf("embeddings for %zu snapshots written to %s\n", embeddings.size(), out_dir.c_str());
    std::printf("last-snapshot micro F1: %.4f\n", score.last_snapshot_micro_f1);
    return 0;
}

EmbeddingSequence load_embeddings(const std::string& dir, const SnapshotSequence& seq) {
    std::unordered_map<NodeLabel, NodeId> id_of;
    for (NodeId v = 0; v < seq.labels.size(); ++v)
        id_of.emplace(seq.labels[v], v);
    EmbeddingSequence embeddings;
    for (const auto& snap : seq.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%03d.emb", snap.index);
        std::ifstream in(fs::path(dir) / name);
        if (!in)
            throw std::runtime_error(std::string("missing embedding dump ") + name + " in " + dir);
        embeddings.push_back(read_embedding(in, id_of, snap.index));
    }
    return embeddings;
}

int cmd_evaluate(const CommonArgs& args, const std::string& embeddings_dir, const std::string& out_csv) {
    SnapshotSequence seq = load_sequence(args);
    EmbeddingSequence embeddings = load_embeddings(embeddings_dir, seq);
    SequenceScore score = evaluate_sequence(embeddings, seq);
    std::ofstream out(out_csv);
    if (!out)
        throw std::runtime_error("cannot write " + out_csv);
    write_metrics_csv(out, score, seq.labels);
    for (const auto& snap : score.per_snapshot)
        std::printf("snapshot %-3d micro P/R/F1 = %.4f/%.4f/%.4f  macro F1 = %.4f\n", snap.snapshot_index,
                    snap.micro.precision, snap.micro.recall, snap.micro.f1, snap.macro.f1);
    std::printf("metrics written to %s\n", out_csv.c_str());
    return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& embeddings_dir, const std::string& out_json) {
    SnapshotSequence seq = load_sequence(args);
    EmbeddingSequence embeddings = load_embeddings(embeddings_dir, seq);
    SequenceScore score = evaluate_sequence(embeddings, seq);
    nlohmann::ordered_json report = build_stats_report(seq, score.per_snapshot);
    report["dataset"] = fs::path(args.dataset).filename().string();
    std::ofstream out(out_json);
    if (!out)
        throw std::runtime_error("cannot write " + out_json);
    out << report.dump(2) << '\n';
    if (report.contains("pooled"))
        std::printf("pooled: F1(hubs)=%.4f F1(non-hubs)=%.4f PS(hubs)=%.4f PS(non-hubs)=%.4f p=%.4g\n",
                    report["pooled"]["f1_hubs"].get<double>(),
                    report["pooled"]["f1_non_hubs"].get<double>(),
                    report["pooled"]["ps_hubs"].get<double>(),
                    report["pooled"]["ps_non_hubs"].get<double>(),
                    report["pooled"]["p_value"].get<double>());
    std::printf("stats report written to %s\n", out_json.c_str());
    return 0;
}

int cmd_tune(const CommonArgs& args, const std::string& strategy, const std::vector<int>& dims,
             int walks, int walk_length, int runs, const std::string& out_dir) {
    ExperimentSpec spec;
    spec.dataset_path = args.dataset;
    spec.binning = binning_from(args);
    spec.runs_per_config = runs;
    spec.master_seed = args.seed;
    spec.out_dir = out_dir;
    spec.threads = args.threads;
    spec.deterministic = args.deterministic;

    if (strategy == "node2vec")
        spec.strategy_grid = baseline_strategy_grid(walks, walk_length);
    else if (strategy == "deephub")
        spec.strategy_grid = deephub_strategy_grid(walks, walk_length);
    else if (strategy == "uniform") {
        SamplingPlan plan;
        plan.strategy = StrategyKind::Uniform;
        plan.num_walks_per_node = walks;
        plan.walk_length = walk_length;
        spec.strategy_grid = {plan};
    } else {
        throw CLI::ValidationError("unknown strategy '" + strategy + "'");
    }

    TrainerConfig base;
    spec.trainer_grid = dimension_grid(base, dims);

    ExperimentResult result = run_experiment(spec);
    const auto& best = result.configs[result.best_index];
    std::printf("%zu configurations x %d runs scored\n", result.configs.size(), runs);
    std::printf("best config #%zu: mean last-snapshot micro F1 = %.4f\n", best.config_index, best.mean_f1);
    std::printf("bundle written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_compare(const std::string& baseline_dir, const std::string& challenger_dir,
                const std::string& out_csv) {
    ComparisonRow row = compare_strategies(baseline_dir, challenger_dir);
    std::vector<ComparisonRow> rows{row};
    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        write_comparison_csv(out, rows);
    }
    write_comparison_csv(std::cout, rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hub-aware dynamic graph embedding toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string strategy = "deephub";
    double p = 0.5, q = 1.0, u = 0.5;
    std::string scoring = "inverse";
    int dim = 100, walks = 10, walk_length = 32, runs = 10;
    std::vector<int> dims;
    std::string out_dir = "out", out_file, embeddings_dir, dump_dir, walks_dump;
    std::string baseline_dir, challenger_dir;

    auto add_common = [&](CLI::App* cmd, bool with_binning = true) {
        cmd->add_option("--dataset", args.dataset, "Temporal edge list (source target timestamp [weight])")
            ->required();
        if (with_binning)
            add_binning_flags(cmd, args);
        cmd->add_option("--seed", args.seed, "Master seed");
        cmd->add_option("--threads", args.threads, "Worker threads");
        cmd->add_flag("--deterministic,!--no-deterministic", args.deterministic,
                      "Single-threaded training per run (default on)");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse and bin a dataset, report its statistics");
    add_common(ingest);
    ingest->add_option("--dump-dir", dump_dir, "Also write one edge list per snapshot");

    auto* embed = app.add_subcommand("embed", "Embed one configuration, dump per-snapshot embeddings");
    add_common(embed);
    embed->add_option("--strategy", strategy, "uniform | node2vec | deephub");
    embed->add_option("--dim", dim, "Embedding dimension");
    embed->add_option("--p", p, "node2vec return parameter / deephub backtrack probability");
    embed->add_option("--q", q, "node2vec in-out parameter");
    embed->add_option("--u", u, "deephub uniform-move probability");
    embed->add_option("--scoring", scoring, "deephub scoring: normal | log | inverse | inverse-log");
    embed->add_option("--walks", walks, "Walks per start node");
    embed->add_option("--walk-length", walk_length, "Walk length");
    embed->add_option("--out", out_dir, "Output directory for embedding dumps");
    embed->add_option("--dump-walks", walks_dump, "Dump the snapshot-1 walk corpus to a file");

    auto* tune = app.add_subcommand("tune", "Grid search with multi-run averaging, write a bundle");
    add_common(tune);
    tune->add_option("--strategy", strategy, "uniform | node2vec | deephub");
    tune->add_option("--dims,--dim", dims, "Dimensions to scan (default: 10 25 50 100 200)");
    tune->add_option("--walks", walks, "Walks per start node");
    tune->add_option("--walk-length", walk_length, "Walk length");
    tune->add_option("--runs", runs, "Independent runs per configuration");
    tune->add_option("--out", out_dir, "Bundle output directory");

    auto* evaluate = app.add_subcommand("evaluate", "Score embedding dumps by graph reconstruction");
    add_common(evaluate);
    evaluate->add_option("--embeddings", embeddings_dir, "Directory with snapshot_XXX.emb dumps")->required();
    evaluate->add_option("--out", out_file, "Metrics CSV path")->required();

    auto* analyze = app.add_subcommand("analyze", "Correlations and hub/non-hub MWU report");
    add_common(analyze);
    analyze->add_option("--embeddings", embeddings_dir, "Directory with snapshot_XXX.emb dumps")->required();
    analyze->add_option("--out", out_file, "Stats JSON path")->required();

    auto* compare = app.add_subcommand("compare", "Compare two tuning bundles (baseline vs challenger)");
    compare->add_option("--baseline", baseline_dir, "Baseline bundle directory")->required();
    compare->add_option("--challenger", challenger_dir, "Challenger bundle directory")->required();
    compare->add_option("--out", out_file, "Comparison CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed())
            return cmd_ingest(args, dump_dir);
        if (embed->parsed())
            return cmd_embed(args, plan_from(strategy, p, q, u, scoring, walks, walk_length),
                             TrainerConfig{.dimension = dim}, out_dir, walks_dump);
        if (tune->parsed())
            return cmd_tune(args, strategy, dims, walks, walk_length, runs, out_dir);
        if (evaluate->parsed())
            return cmd_evaluate(args, embeddings_dir, out_file);
        if (analyze->parsed())
            return cmd_analyze(args, embeddings_dir, out_file);
        if (compare->parsed())
            return cmd_compare(baseline_dir, challenger_dir, out_file);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
