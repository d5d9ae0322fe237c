#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "temporal_graph.hpp"
#include "trainer.hpp"

namespace deephub {

/// Per-node link reconstruction quality for one snapshot.
struct NodeMetrics {
    NodeId node = 0;
    int correct = 0;      // correctly reconstructed incident links
    int recon_degree = 0; // incident links in the reconstructed graph
    int orig_degree = 0;  // incident links in the original snapshot
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct AggregateMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct SnapshotScore {
    int snapshot_index = 0;
    std::size_t edge_budget = 0;
    std::vector<NodeMetrics> per_node; // ordered by node id
    AggregateMetrics micro;
    AggregateMetrics macro;
};

struct SequenceScore {
    std::vector<SnapshotScore> per_snapshot;
    double last_snapshot_micro_f1 = 0.0; // the tuning objective
};

namespace detail {

inline double harmonic_mean(double a, double b) {
    if (a + b == 0.0)
        return 0.0;
    return 2.0 * a * b / (a + b);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        d2 += d * d;
    }
    return d2;
}

} // namespace detail

/// Rebuilds a graph from an embedding by connecting the edge_budget closest
/// node pairs under Euclidean distance. Ties at the cutoff break by
/// lexicographic pair order, so the result is deterministic. Pairs are
/// returned with u < v, ordered by (distance, pair).
inline std::vector<std::pair<NodeId, NodeId>> reconstruct_graph(const SnapshotEmbedding& embedding,
                                                                std::size_t edge_budget) {
    const std::size_t n = embedding.nodes.size();
    if (n < 2)
        throw std::invalid_argument("reconstruct_graph: need at least 2 embedded nodes");
    const std::size_t num_pairs = n * (n - 1) / 2;
    if (edge_budget < 1 || edge_budget > num_pairs)
        throw std::invalid_argument("reconstruct_graph: edge budget " + std::to_string(edge_budget) +
                                    " out of range [1, " + std::to_string(num_pairs) + "]");

    struct ScoredPair {
        double dist2;
        NodeId u, v;
        bool operator<(const ScoredPair& o) const {
            if (dist2 != o.dist2)
                return dist2 < o.dist2;
            if (u != o.u)
                return u < o.u;
            return v < o.v;
        }
    };

    std::vector<ScoredPair> pairs;
    pairs.reserve(num_pairs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k)
            pairs.push_back({detail::squared_distance(embedding.vectors[i], embedding.vectors[k]),
                             embedding.nodes[i], embedding.nodes[k]});

    std::nth_element(pairs.begin(), pairs.begin() + (edge_budget - 1), pairs.end());
    std::sort(pairs.begin(), pairs.begin() + edge_budget);

    std::vector<std::pair<NodeId, NodeId>> result;
    result.reserve(edge_budget);
    for (std::size_t i = 0; i < edge_budget; ++i)
        result.emplace_back(pairs[i].u, pairs[i].v);
    return result;
}

/// Scores a reconstructed edge set against the original snapshot. Per-node
/// precision is 0 when the node has no reconstructed links; micro aggregates
/// pool the correct/degree counts before forming the ratios, macro averages
/// the per-node scores.
inline SnapshotScore score_reconstruction(const Snapshot& snapshot,
                                          const std::vector<std::pair<NodeId, NodeId>>& reconstructed) {
    std::vector<int> recon_degree(snapshot.adj.size(), 0);
    std::vector<int> correct(snapshot.adj.size(), 0);
    for (auto [u, v] : reconstructed) {
        if (!snapshot.has_node(u) || !snapshot.has_node(v))
            throw std::invalid_argument("score_reconstruction: pair endpoint outside snapshot node set");
        ++recon_degree[u];
        ++recon_degree[v];
        if (snapshot.has_edge(u, v)) {
            ++correct[u];
            ++correct[v];
        }
    }

    SnapshotScore score;
    score.snapshot_index = snapshot.index;
    score.edge_budget = reconstructed.size();
    long long sum_correct = 0, sum_recon = 0, sum_orig = 0;
    double macro_p = 0, macro_r = 0, macro_f1 = 0;
    for (NodeId v : snapshot.nodes) {
        NodeMetrics m;
        m.node = v;
        m.correct = correct[v];
        m.recon_degree = recon_degree[v];
        m.orig_degree = static_cast<int>(snapshot.adj[v].size());
        m.precision = m.recon_degree > 0 ? static_cast<double>(m.correct) / m.recon_degree : 0.0;
        m.recall = m.orig_degree > 0 ? static_cast<double>(m.correct) / m.orig_degree : 0.0;
        m.f1 = detail::harmonic_mean(m.precision, m.recall);
        sum_correct += m.correct;
        sum_recon += m.recon_degree;
        sum_orig += m.orig_degree;
        macro_p += m.precision;
        macro_r += m.recall;
        macro_f1 += m.f1;
        score.per_node.push_back(m);
    }

    score.micro.precision = sum_recon > 0 ? static_cast<double>(sum_correct) / sum_recon : 0.0;
    score.micro.recall = sum_orig > 0 ? static_cast<double>(sum_correct) / sum_orig : 0.0;
    score.micro.f1 = detail::harmonic_mean(score.micro.precision, score.micro.recall);
    const double n = static_cast<double>(score.per_node.size());
    if (n > 0) {
        score.macro.precision = macro_p / n;
        score.macro.recall = macro_r / n;
        score.macro.f1 = macro_f1 / n;
    }
    return score;
}

/// Applies the reconstruction protocol to every snapshot: budget |E_i|,
/// embedding i restricted to V_i. The last snapshot's micro F1 is the
/// hyperparameter tuning objective.
inline SequenceScore evaluate_sequence(const EmbeddingSequence& embeddings, const SnapshotSequence& seq) {
    if (embeddings.size() != seq.snapshots.size())
        throw std::invalid_argument("evaluate_sequence: embedding/snapshot length mismatch");

    SequenceScore result;
    for (std::size_t i = 0; i < seq.snapshots.size(); ++i) {
        const Snapshot& snap = seq.snapshots[i];
        const SnapshotEmbedding& full = embeddings[i];

        SnapshotEmbedding restricted;
        restricted.snapshot_index = snap.index;
        for (NodeId v : snap.nodes) {
            const auto* vec = full.find(v);
            if (!vec)
                throw std::invalid_argument("evaluate_sequence: snapshot " + std::to_string(snap.index) +
                                            " node " + std::to_string(v) + " missing from embedding");
            restricted.nodes.push_back(v);
            restricted.vectors.push_back(*vec);
        }

        auto pairs = reconstruct_graph(restricted, snap.edge_count);
        result.per_snapshot.push_back(score_reconstruction(snap, pairs));
    }
    result.last_snapshot_micro_f1 = result.per_snapshot.back().micro.f1;
    return result;
}

/// CSV rows: one per (snapshot, node), then micro/macro summary rows per
/// snapshot (identified in the node column).
inline void write_metrics_csv(std::ostream& out, const SequenceScore& scores,
                              std::span<const NodeLabel> labels) {
    out << "snapshot,node,correct,recon_degree,orig_degree,precision,recall,f1\n";
    char buf[160];
    for (const auto& snap : scores.per_snapshot) {
        for (const auto& m : snap.per_node) {
            std::snprintf(buf, sizeof(buf), "%d,%lld,%d,%d,%d,%.6f,%.6f,%.6f\n", snap.snapshot_index,
                          static_cast<long long>(labels[m.node]), m.correct, m.recon_degree, m.orig_degree,
                          m.precision, m.recall, m.f1);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%d,micro,,,,%.6f,%.6f,%.6f\n", snap.snapshot_index,
                      snap.micro.precision, snap.micro.recall, snap.micro.f1);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%d,macro,,,,%.6f,%.6f,%.6f\n", snap.snapshot_index,
                      snap.macro.precision, snap.macro.recall, snap.macro.f1);
        out << buf;
    }
}

} // namespace deephub
