#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace deephub {

using NodeId = std::uint32_t;
using NodeLabel = std::int64_t;

/// One interaction event. Endpoints are dense ids assigned at parse time;
/// the original labels live in the accompanying label table.
struct TemporalEdge {
    NodeId source = 0;
    NodeId target = 0;
    std::int64_t timestamp = 0;
    double weight = 1.0;
};

/// Parsed edge stream plus the dense-id -> original-label table.
struct EdgeList {
    std::vector<TemporalEdge> edges;
    std::vector<NodeLabel> labels;

    std::size_t node_count() const { return labels.size(); }
};

/// One static graph of the evolutionary sequence. Undirected, simple,
/// no isolated nodes (the node set is exactly the set of edge endpoints).
/// Immutable after construction.
class Snapshot {
public:
    int index = 0;                        // 1-based position in the sequence
    std::vector<NodeId> nodes;            // sorted
    std::vector<std::vector<NodeId>> adj; // per dense id, sorted unique neighbors
    std::size_t edge_count = 0;

    bool has_node(NodeId v) const {
        return v < adj.size() && !adj[v].empty();
    }

    std::span<const NodeId> neighbors(NodeId v) const {
        static const std::vector<NodeId> empty;
        if (v >= adj.size())
            return empty;
        return adj[v];
    }

    bool has_edge(NodeId u, NodeId v) const {
        if (u >= adj.size())
            return false;
        return std::binary_search(adj[u].begin(), adj[u].end(), v);
    }

    /// Builds a snapshot from an undirected edge list. Duplicates collapse,
    /// self-loops are rejected.
    static Snapshot from_edges(int index, const std::vector<std::pair<NodeId, NodeId>>& edges) {
        Snapshot snap;
        snap.index = index;
        NodeId max_id = 0;
        for (auto [u, v] : edges) {
            if (u == v)
                throw std::invalid_argument("Snapshot::from_edges: self-loop " + std::to_string(u));
            max_id = std::max({max_id, u, v});
        }
        snap.adj.resize(edges.empty() ? 0 : max_id + 1);
        for (auto [u, v] : edges) {
            snap.adj[u].push_back(v);
            snap.adj[v].push_back(u);
        }
        for (NodeId v = 0; v < snap.adj.size(); ++v) {
            auto& nb = snap.adj[v];
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            if (!nb.empty()) {
                snap.nodes.push_back(v);
                snap.edge_count += nb.size();
            }
        }
        snap.edge_count /= 2;
        return snap;
    }
};

struct SnapshotSequence {
    std::vector<Snapshot> snapshots;
    std::vector<NodeLabel> labels; // dense id -> original label

    std::size_t size() const { return snapshots.size(); }
};

/// How the edge stream is cut into snapshots.
struct Binning {
    enum class Mode { FixedCount, FixedWidth };

    Mode mode = Mode::FixedCount;
    int count = 1;             // FixedCount
    std::int64_t width = 1;    // FixedWidth, seconds

    static Binning fixed_count(int n) {
        if (n < 1)
            throw std::invalid_argument("binning: snapshot count must be >= 1");
        return Binning{Mode::FixedCount, n, 1};
    }

    static Binning fixed_width(std::int64_t seconds) {
        if (seconds <= 0)
            throw std::invalid_argument("binning: width must be > 0");
        return Binning{Mode::FixedWidth, 1, seconds};
    }
};

namespace detail {

inline std::int64_t parse_int_field(std::string_view field, const char* what, std::size_t line_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": non-numeric " +
                                 what + " field '" + std::string(field) + "'");
    return value;
}

inline double parse_real_field(std::string_view field, const char* what, std::size_t line_no) {
    // std::from_chars<double> is available in libstdc++ 11, but strtod keeps
    // the error message path identical to the integer case.
    std::string buf(field);
    char* end = nullptr;
    double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty())
        throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": non-numeric " +
                                 what + " field '" + buf + "'");
    return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
        std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
        if (pos > start)
            fields.push_back(line.substr(start, pos - start));
    }
    return fields;
}

} // namespace detail

/// Parses a plain-text temporal edge list: "source target timestamp [weight]"
/// per line, '#'- or '%'-prefixed comment lines skipped. Self-loops are
/// dropped. Node labels are normalized to dense ids in order of first
/// appearance among the kept edges.
inline EdgeList parse_edge_stream(std::istream& in) {
    EdgeList result;
    std::unordered_map<NodeLabel, NodeId> id_of;
    auto intern = [&](NodeLabel label) -> NodeId {
        auto it = id_of.find(label);
        if (it != id_of.end())
            return it->second;
        NodeId id = static_cast<NodeId>(result.labels.size());
        result.labels.push_back(label);
        id_of.emplace(label, id);
        return id;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_fields(line);
        if (fields.empty() || fields[0][0] == '#' || fields[0][0] == '%')
            continue;
        if (fields.size() != 3 && fields.size() != 4)
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": expected 3 or 4 fields, got " +
                                     std::to_string(fields.size()));
        NodeLabel src = detail::parse_int_field(fields[0], "source", line_no);
        NodeLabel dst = detail::parse_int_field(fields[1], "target", line_no);
        std::int64_t ts = detail::parse_int_field(fields[2], "timestamp", line_no);
        if (ts < 0)
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": negative timestamp");
        double weight = 1.0;
        if (fields.size() == 4) {
            weight = detail::parse_real_field(fields[3], "weight", line_no);
            if (!(weight > 0))
                throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": weight must be positive");
        }
        if (src == dst)
            continue; // self-loop
        result.edges.push_back(TemporalEdge{intern(src), intern(dst), ts, weight});
    }
    if (result.edges.empty())
        throw std::runtime_error("no edges");
    return result;
}

inline EdgeList parse_edge_stream(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_stream(in);
}

/// Bins a temporal edge stream into a snapshot sequence. Bins are half-open
/// [t_min + (i-1)*w, t_min + i*w); in fixed-count mode the last bin is closed
/// on the right so t_max is kept. Empty bins are dropped and the remaining
/// snapshots re-indexed 1..K. Duplicate edges within a bin collapse to one
/// undirected edge; weights are parsed but ignored here.
inline SnapshotSequence bin_snapshots(const EdgeList& stream, const Binning& binning) {
    if (stream.edges.empty())
        throw std::invalid_argument("bin_snapshots: no edges");

    std::int64_t t_min = stream.edges.front().timestamp;
    std::int64_t t_max = t_min;
    for (const auto& e : stream.edges) {
        t_min = std::min(t_min, e.timestamp);
        t_max = std::max(t_max, e.timestamp);
    }

    auto bin_of = [&](std::int64_t t) -> std::size_t {
        if (binning.mode == Binning::Mode::FixedWidth)
            return static_cast<std::size_t>((t - t_min) / binning.width);
        const std::int64_t span = t_max - t_min;
        if (span == 0)
            return 0;
        // floor((t - t_min) * N / span), exact in 128-bit; t = t_max lands in
        // bin N which is clamped back into the final bin.
        unsigned __int128 scaled =
            static_cast<unsigned __int128>(t - t_min) * static_cast<unsigned __int128>(binning.count);
        auto idx = static_cast<std::size_t>(scaled / static_cast<unsigned __int128>(span));
        return std::min(idx, static_cast<std::size_t>(binning.count - 1));
    };

    std::map<std::size_t, std::set<std::pair<NodeId, NodeId>>> bins;
    for (const auto& e : stream.edges) {
        auto [u, v] = std::minmax(e.source, e.target);
        bins[bin_of(e.timestamp)].insert({u, v});
    }

    SnapshotSequence seq;
    seq.labels = stream.labels;
    int next_index = 1;
    for (auto& [bin, edge_set] : bins) {
        std::vector<std::pair<NodeId, NodeId>> edges(edge_set.begin(), edge_set.end());
        Snapshot snap = Snapshot::from_edges(next_index++, edges);
        snap.adj.resize(stream.labels.size()); // shared dense id space
        seq.snapshots.push_back(std::move(snap));
    }
    return seq;
}

/// Number of distinct neighbors of v in this snapshot.
inline int degree(const Snapshot& snapshot, NodeId v) {
    if (!snapshot.has_node(v))
        throw std::invalid_argument("degree: unknown node " + std::to_string(v));
    return static_cast<int>(snapshot.adj[v].size());
}

/// Delta (evolving) nodes: nodes new in `current` plus nodes whose incident
/// edge set changed since `previous`. Nodes absent from `current` are never
/// reported.
inline std::vector<NodeId> delta_nodes(const Snapshot& current, const Snapshot& previous) {
    std::vector<NodeId> result;
    for (NodeId v : current.nodes) {
        if (!previous.has_node(v)) {
            result.push_back(v); // new node
        } else if (current.adj[v] != previous.adj[v]) {
            result.push_back(v); // incident edges changed
        }
    }
    return result;
}

/// Dataset summary over the whole evolution. Activation of a node (edge) is the number
/// of snapshots in which it is present.
struct DatasetStats {
    std::size_t total_nodes = 0;
    std::size_t total_edges = 0;
    std::size_t num_snapshots = 0;
    double avg_node_activation = 0.0;
    double avg_edge_activation = 0.0;
    std::vector<std::size_t> nodes_per_snapshot;
    std::vector<std::size_t> edges_per_snapshot;
};

inline DatasetStats dataset_stats(const SnapshotSequence& seq) {
    DatasetStats stats;
    stats.num_snapshots = seq.snapshots.size();
    std::unordered_map<NodeId, std::size_t> node_hits;
    std::map<std::pair<NodeId, NodeId>, std::size_t> edge_hits;
    for (const auto& snap : seq.snapshots) {
        stats.nodes_per_snapshot.push_back(snap.nodes.size());
        stats.edges_per_snapshot.push_back(snap.edge_count);
        for (NodeId v : snap.nodes) {
            ++node_hits[v];
            for (NodeId w : snap.adj[v])
                if (v < w)
                    ++edge_hits[{v, w}];
        }
    }
    stats.total_nodes = node_hits.size();
    stats.total_edges = edge_hits.size();
    double node_sum = 0, edge_sum = 0;
    for (const auto& [v, hits] : node_hits)
        node_sum += static_cast<double>(hits);
    for (const auto& [e, hits] : edge_hits)
        edge_sum += static_cast<double>(hits);
    if (stats.total_nodes > 0)
        stats.avg_node_activation = node_sum / static_cast<double>(stats.total_nodes);
    if (stats.total_edges > 0)
        stats.avg_edge_activation = edge_sum / static_cast<double>(stats.total_edges);
    return stats;
}

/// Serializes a snapshot sequence as one edge list, "label_u label_v index"
/// per line. Re-parsing with fixed_width(1) binning reproduces the structure.
inline void dump_snapshots(std::ostream& out, const SnapshotSequence& seq) {
    for (const auto& snap : seq.snapshots)
        for (NodeId v : snap.nodes)
            for (NodeId w : snap.adj[v])
                if (v < w)
                    out << seq.labels[v] << ' ' << seq.labels[w] << ' ' << snap.index << '\n';
}

/// One edge-list file per snapshot, "label_u label_v" per line.
inline void dump_snapshot_edges(std::ostream& out, const SnapshotSequence& seq, std::size_t snapshot_pos) {
    const auto& snap = seq.snapshots.at(snapshot_pos);
    for (NodeId v : snap.nodes)
        for (NodeId w : snap.adj[v])
            if (v < w)
                out << seq.labels[v] << ' ' << seq.labels[w] << '\n';
}

} // namespace deephub
