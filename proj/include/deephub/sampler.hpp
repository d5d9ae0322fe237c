#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "random.hpp"
#include "temporal_graph.hpp"

namespace deephub {

/// Degree-scoring flags for the hub-aware transition distribution.
struct DegreeScoring {
    bool inverse = false;
    bool log_scaling = false;
};

enum class ScoringKind { Normal, Log, Inverse, InverseLog };

inline DegreeScoring to_scoring(ScoringKind kind) {
    switch (kind) {
    case ScoringKind::Normal: return {false, false};
    case ScoringKind::Log: return {false, true};
    case ScoringKind::Inverse: return {true, false};
    case ScoringKind::InverseLog: return {true, true};
    }
    throw std::invalid_argument("unknown scoring kind");
}

inline std::string scoring_name(ScoringKind kind) {
    switch (kind) {
    case ScoringKind::Normal: return "normal";
    case ScoringKind::Log: return "log";
    case ScoringKind::Inverse: return "inverse";
    case ScoringKind::InverseLog: return "inverse-log";
    }
    throw std::invalid_argument("unknown scoring kind");
}

inline ScoringKind scoring_from_name(const std::string& name) {
    if (name == "normal") return ScoringKind::Normal;
    if (name == "log") return ScoringKind::Log;
    if (name == "inverse") return ScoringKind::Inverse;
    if (name == "inverse-log") return ScoringKind::InverseLog;
    throw std::invalid_argument("unknown scoring '" + name + "'");
}

struct DeepHubConfig {
    double p = 0.0; // backtrack probability
    double u = 0.0; // uniform-move probability
    bool inverse = false;
    bool log_scaling = false;

    DegreeScoring scoring() const { return {inverse, log_scaling}; }
};

struct WalkContext {
    NodeId start_node = 0;
    NodeId current_node = 0;
    std::optional<NodeId> prev_node;
};

enum class StrategyKind { Uniform, Node2vec, DeepHub };

inline std::string strategy_name(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::Uniform: return "uniform";
    case StrategyKind::Node2vec: return "node2vec";
    case StrategyKind::DeepHub: return "deephub";
    }
    throw std::invalid_argument("unknown strategy kind");
}

inline StrategyKind strategy_from_name(const std::string& name) {
    if (name == "uniform") return StrategyKind::Uniform;
    if (name == "node2vec") return StrategyKind::Node2vec;
    if (name == "deephub") return StrategyKind::DeepHub;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

struct SamplingPlan {
    int num_walks_per_node = 10;
    int walk_length = 32;
    StrategyKind strategy = StrategyKind::Uniform;
    double p = 1.0; // node2vec return parameter
    double q = 1.0; // node2vec in-out parameter
    DeepHubConfig deephub;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_walks_per_node < 1 || walk_length < 1)
            throw std::invalid_argument("sampling plan: walks per node and walk length must be >= 1");
        if (deephub.p < 0 || deephub.p > 1 || deephub.u < 0 || deephub.u > 1)
            throw std::invalid_argument("sampling plan: deephub p and u must lie in [0,1]");
        if (p <= 0 || q <= 0)
            throw std::invalid_argument("sampling plan: node2vec p and q must be > 0");
    }
};

struct WalkCorpus {
    std::vector<std::vector<NodeId>> walks;

    bool empty() const { return walks.empty(); }
    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& w : walks)
            n += w.size();
        return n;
    }
};

/// Degree-based transition probabilities over the neighbors of `current`,
/// aligned with snapshot.neighbors(current). Scores follow the hub-aware
/// scheme: 1 + max_deg - deg(n) in inverse mode, 1 + deg(n) otherwise,
/// optionally ln(1 + score). Laplace smoothing keeps every entry positive.
inline std::vector<double> transition_distribution(const Snapshot& snapshot, NodeId current,
                                                   const DegreeScoring& cfg) {
    auto neighbors = snapshot.neighbors(current);
    if (neighbors.empty())
        throw std::runtime_error("dead end: node " + std::to_string(current) + " has no neighbors");

    int max_deg = 0;
    for (NodeId n : neighbors)
        max_deg = std::max(max_deg, degree(snapshot, n));

    std::vector<double> probs(neighbors.size());
    double total = 0.0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        int deg = degree(snapshot, neighbors[i]);
        double score = cfg.inverse ? 1.0 + static_cast<double>(max_deg - deg)
                                   : 1.0 + static_cast<double>(deg);
        if (cfg.log_scaling)
            score = std::log(1.0 + score);
        probs[i] = score;
        total += score;
    }
    for (double& p : probs)
        p /= total;
    return probs;
}

namespace detail {

/// Inverse-CDF sampling over a small probability vector.
inline std::size_t sample_discrete(std::span<const double> probs, Rng& rng) {
    double r = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (r < acc)
            return i;
    }
    return probs.size() - 1;
}

} // namespace detail

/// DeepHub next-node selection: backtrack with probability p (skipped when
/// there is no previous node), uniform move with probability u, otherwise a
/// degree-biased draw from transition_distribution.
inline NodeId next_node_deephub(const WalkContext& ctx, const Snapshot& snapshot,
                                const DeepHubConfig& cfg, Rng& rng) {
    auto neighbors = snapshot.neighbors(ctx.current_node);
    if (neighbors.empty())
        throw std::runtime_error("dead end: node " + std::to_string(ctx.current_node) + " has no neighbors");

    if (ctx.prev_node && rng.uniform01() < cfg.p)
        return *ctx.prev_node;
    if (rng.uniform01() < cfg.u)
        return neighbors[rng.below(neighbors.size())];

    auto probs = transition_distribution(snapshot, ctx.current_node, cfg.scoring());
    return neighbors[detail::sample_discrete(probs, rng)];
}

/// Same selection with a memoized distribution (valid because the hub-aware
/// distribution depends only on the current node and the flags).
inline NodeId next_node_deephub_memo(const WalkContext& ctx, const Snapshot& snapshot,
                                     const DeepHubConfig& cfg, std::span<const double> probs,
                                     Rng& rng) {
    auto neighbors = snapshot.neighbors(ctx.current_node);
    if (ctx.prev_node && rng.uniform01() < cfg.p)
        return *ctx.prev_node;
    if (rng.uniform01() < cfg.u)
        return neighbors[rng.below(neighbors.size())];
    return neighbors[detail::sample_discrete(probs, rng)];
}

/// Standard node2vec second-order bias: weight 1/p back to the previous node,
/// 1 to neighbors adjacent to it, 1/q to the rest. First transition is uniform.
inline NodeId next_node_node2vec(const WalkContext& ctx, const Snapshot& snapshot,
                                 double p, double q, Rng& rng) {
    auto neighbors = snapshot.neighbors(ctx.current_node);
    if (neighbors.empty())
        throw std::runtime_error("dead end: node " + std::to_string(ctx.current_node) + " has no neighbors");

    if (!ctx.prev_node)
        return neighbors[rng.below(neighbors.size())];

    NodeId prev = *ctx.prev_node;
    std::vector<double> weights(neighbors.size());
    double total = 0.0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        NodeId n = neighbors[i];
        double w;
        if (n == prev)
            w = 1.0 / p;
        else if (snapshot.has_edge(prev, n))
            w = 1.0;
        else
            w = 1.0 / q;
        weights[i] = w;
        total += w;
    }
    for (double& w : weights)
        w /= total;
    return neighbors[detail::sample_discrete(weights, rng)];
}

namespace detail {

inline void run_one_walk(const Snapshot& snapshot, NodeId start, const SamplingPlan& plan,
                         std::span<const std::vector<double>> memo, Rng& rng,
                         std::vector<NodeId>& out) {
    out.clear();
    out.reserve(plan.walk_length);
    WalkContext ctx{start, start, std::nullopt};
    out.push_back(start);
    for (int step = 1; step < plan.walk_length; ++step) {
        if (snapshot.neighbors(ctx.current_node).empty())
            break; // dead end, walk truncated
        NodeId next;
        switch (plan.strategy) {
        case StrategyKind::Uniform: {
            auto nb = snapshot.neighbors(ctx.current_node);
            next = nb[rng.below(nb.size())];
            break;
        }
        case StrategyKind::Node2vec:
            next = next_node_node2vec(ctx, snapshot, plan.p, plan.q, rng);
            break;
        case StrategyKind::DeepHub:
            next = next_node_deephub_memo(ctx, snapshot, plan.deephub, memo[ctx.current_node], rng);
            break;
        }
        out.push_back(next);
        ctx.prev_node = ctx.current_node;
        ctx.current_node = next;
    }
}

} // namespace detail

/// Samples num_walks_per_node walks of walk_length steps from every start
/// node. Walks are ordered by (start node, replica); each walk draws from its
/// own random stream keyed by (seed, snapshot index, start node, replica), so
/// the corpus is identical for any worker count.
inline WalkCorpus sample_walks(const Snapshot& snapshot, std::vector<NodeId> start_nodes,
                               const SamplingPlan& plan, int threads = 1) {
    plan.validate();
    std::sort(start_nodes.begin(), start_nodes.end());
    start_nodes.erase(std::unique(start_nodes.begin(), start_nodes.end()), start_nodes.end());
    for (NodeId v : start_nodes)
        if (!snapshot.has_node(v))
            throw std::invalid_argument("sample_walks: start node " + std::to_string(v) +
                                        " not in snapshot " + std::to_string(snapshot.index));

    WalkCorpus corpus;
    if (start_nodes.empty())
        return corpus;

    // Memoize the degree-biased distribution once per node.
    std::vector<std::vector<double>> memo;
    if (plan.strategy == StrategyKind::DeepHub) {
        memo.resize(snapshot.adj.size());
        for (NodeId v : snapshot.nodes)
            memo[v] = transition_distribution(snapshot, v, plan.deephub.scoring());
    }

    const std::size_t total = start_nodes.size() * static_cast<std::size_t>(plan.num_walks_per_node);
    corpus.walks.resize(total);

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            NodeId start = start_nodes[k / plan.num_walks_per_node];
            std::uint64_t replica = k % plan.num_walks_per_node;
            Rng rng(mix_seed(plan.seed, {static_cast<std::uint64_t>(snapshot.index), start, replica}));
            detail::run_one_walk(snapshot, start, plan, memo, rng, corpus.walks[k]);
        }
    };

    if (threads <= 1 || total < 2) {
        worker(0, total);
    } else {
        std::size_t n_workers = std::min<std::size_t>(threads, total);
        std::vector<std::thread> pool;
        std::size_t chunk = (total + n_workers - 1) / n_workers;
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back(worker, w * chunk, std::min(total, (w + 1) * chunk));
        for (auto& t : pool)
            t.join();
    }
    return corpus;
}

/// One walk per line, space-separated node labels.
inline void dump_walks(std::ostream& out, const WalkCorpus& corpus, std::span<const NodeLabel> labels) {
    for (const auto& walk : corpus.walks) {
        for (std::size_t i = 0; i < walk.size(); ++i)
            out << (i ? " " : "") << labels[walk[i]];
        out << '\n';
    }
}

} // namespace deephub
