#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reconstruct.hpp"
#include "temporal_graph.hpp"

namespace deephub {

/// Hubs are the minimal set of highest-degree nodes whose total degree
/// strictly exceeds the total degree of the remaining nodes.
struct HubPartition {
    std::vector<NodeId> hubs;     // sorted by id
    std::vector<NodeId> non_hubs; // sorted by id
};

/// Greedy prefix over nodes sorted by (degree desc, id asc); the shortest
/// prefix whose degree sum strictly exceeds the remainder is the hub set.
inline HubPartition hub_partition(const Snapshot& snapshot) {
    if (snapshot.nodes.empty())
        throw std::invalid_argument("hub_partition: empty snapshot");

    std::vector<NodeId> order = snapshot.nodes;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        int da = static_cast<int>(snapshot.adj[a].size());
        int db = static_cast<int>(snapshot.adj[b].size());
        if (da != db)
            return da > db;
        return a < b;
    });

    long long total = 0;
    for (NodeId v : order)
        total += static_cast<long long>(snapshot.adj[v].size());

    HubPartition part;
    long long prefix = 0;
    std::size_t cut = order.size();
    for (std::size_t i = 0; i < order.size(); ++i) {
        prefix += static_cast<long long>(snapshot.adj[order[i]].size());
        if (prefix > total - prefix) {
            cut = i + 1;
            break;
        }
    }
    part.hubs.assign(order.begin(), order.begin() + cut);
    part.non_hubs.assign(order.begin() + cut, order.end());
    std::sort(part.hubs.begin(), part.hubs.end());
    std::sort(part.non_hubs.begin(), part.non_hubs.end());
    return part;
}

namespace detail {

/// Average fractional ranks, 1-based; ties share the mean rank.
inline std::vector<double> fractional_ranks(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin();
        auto hi = std::upper_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin();
        ranks[i] = 0.5 * static_cast<double>(lo + 1 + hi);
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0)
        throw std::invalid_argument("undefined correlation: constant input");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace detail

/// Spearman rank correlation with average-rank tie handling.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2)
        throw std::invalid_argument("spearman: need at least 2 observations");
    auto rx = detail::fractional_ranks(x);
    auto ry = detail::fractional_ranks(y);
    return detail::pearson(rx, ry);
}

struct MwuResult {
    double U = 0.0;        // statistic for the first (hubs) sample
    double p_value = 1.0;  // two-sided
    bool reject_null = false; // at alpha = 0.05
    double ps_hubs = 0.0;     // P(random a > random b), strict
    double ps_non_hubs = 0.0; // P(random b > random a), strict
    double tie_rate = 0.0;    // remaining pair mass
    bool exact = false;       // enumeration (true) vs normal approximation
};

namespace detail {

/// Doubled midranks of the pooled sample are integers, which keeps the exact
/// enumeration free of floating-point comparisons.
inline std::vector<long long> doubled_pooled_ranks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::vector<long long> twice(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), pooled[i]) - sorted.begin();
        auto hi = std::upper_bound(sorted.begin(), sorted.end(), pooled[i]) - sorted.begin();
        twice[i] = static_cast<long long>(lo + 1 + hi);
    }
    return twice;
}

/// Two-sided permutation p-value over all C(n+m, n) assignments of the pooled
/// observations to the first sample. Feasible up to n+m = 20.
inline double mwu_exact_p(std::span<const long long> twice_ranks, std::size_t n, long long twice_u_obs) {
    const std::size_t N = twice_ranks.size();
    const std::size_t m = N - n;
    const long long nm = static_cast<long long>(n) * static_cast<long long>(m);
    const long long obs_dev = std::llabs(twice_u_obs - nm);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    unsigned long long hits = 0, total = 0;
    while (true) {
        long long twice_ranksum = 0;
        for (std::size_t i : idx)
            twice_ranksum += twice_ranks[i];
        long long twice_u = twice_ranksum - static_cast<long long>(n) * static_cast<long long>(n + 1);
        if (std::llabs(twice_u - nm) >= obs_dev)
            ++hits;
        ++total;

        // next combination in lexicographic order
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == N - n + (i - 1))
            --i;
        if (i == 0)
            break;
        ++idx[i - 1];
        for (std::size_t j = i; j < n; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Normal approximation with tie correction and continuity correction.
inline double mwu_normal_p(std::span<const double> a, std::span<const double> b, double u) {
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    const double N = n + m;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i])
            ++j;
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean = n * m / 2.0;
    const double var = n * m / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (var <= 0.0)
        return 1.0; // all observations tied
    double z = u - mean;
    if (z > 0.5)
        z -= 0.5;
    else if (z < -0.5)
        z += 0.5;
    else
        z = 0.0;
    z /= std::sqrt(var);
    return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

} // namespace detail

/// Mann-Whitney U for samples a (hubs) and b (non-hubs), with the two strict
/// probabilities of superiority. Exact permutation p-value for pooled sizes
/// up to 20, tie-corrected normal approximation beyond.
inline MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: empty sample");

    std::vector<double> sorted_b(b.begin(), b.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    long long greater = 0, ties = 0;
    for (double x : a) {
        auto lo = std::lower_bound(sorted_b.begin(), sorted_b.end(), x) - sorted_b.begin();
        auto hi = std::upper_bound(sorted_b.begin(), sorted_b.end(), x) - sorted_b.begin();
        greater += static_cast<long long>(lo);
        ties += static_cast<long long>(hi - lo);
    }
    const long long nm = static_cast<long long>(a.size()) * static_cast<long long>(b.size());

    MwuResult result;
    result.U = static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
    result.ps_hubs = static_cast<double>(greater) / static_cast<double>(nm);
    result.ps_non_hubs = static_cast<double>(nm - greater - ties) / static_cast<double>(nm);
    result.tie_rate = static_cast<double>(ties) / static_cast<double>(nm);

    if (a.size() + b.size() <= 20) {
        auto twice_ranks = detail::doubled_pooled_ranks(a, b);
        long long twice_u = 2 * greater + ties;
        result.p_value = detail::mwu_exact_p(twice_ranks, a.size(), twice_u);
        result.exact = true;
    } else {
        result.p_value = detail::mwu_normal_p(a, b, result.U);
        result.exact = false;
    }
    result.reject_null = result.p_value < 0.05;
    return result;
}

struct DegreeQualityCorrelation {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t observations = 0;
};

/// Spearman correlation of node degree against each reconstruction metric,
/// pooling (node, snapshot) observations across the whole sequence.
inline DegreeQualityCorrelation degree_quality_correlation(const SnapshotSequence& seq,
                                                           const std::vector<SnapshotScore>& results) {
    if (results.size() != seq.snapshots.size())
        throw std::invalid_argument("degree_quality_correlation: result/sequence length mismatch");
    std::vector<double> degrees, f1, precision, recall;
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto& m : results[i].per_node) {
            degrees.push_back(static_cast<double>(degree(seq.snapshots[i], m.node)));
            f1.push_back(m.f1);
            precision.push_back(m.precision);
            recall.push_back(m.recall);
        }
    }
    DegreeQualityCorrelation corr;
    corr.observations = degrees.size();
    corr.f1 = spearman(degrees, f1);
    corr.precision = spearman(degrees, precision);
    corr.recall = spearman(degrees, recall);
    return corr;
}

struct HubComparison {
    std::size_t hub_count = 0;
    std::size_t non_hub_count = 0;
    double f1_hubs_mean = 0.0;
    double f1_non_hubs_mean = 0.0;
    MwuResult mwu;
};

inline HubComparison compare_f1_by_hubness(std::span<const double> hub_f1, std::span<const double> non_hub_f1) {
    HubComparison cmp;
    cmp.hub_count = hub_f1.size();
    cmp.non_hub_count = non_hub_f1.size();
    cmp.f1_hubs_mean = hub_f1.empty() ? 0.0
                                      : std::accumulate(hub_f1.begin(), hub_f1.end(), 0.0) /
                                            static_cast<double>(hub_f1.size());
    cmp.f1_non_hubs_mean = non_hub_f1.empty() ? 0.0
                                              : std::accumulate(non_hub_f1.begin(), non_hub_f1.end(), 0.0) /
                                                    static_cast<double>(non_hub_f1.size());
    cmp.mwu = mann_whitney_u(hub_f1, non_hub_f1);
    return cmp;
}

namespace detail {

inline nlohmann::ordered_json hub_comparison_json(const HubComparison& cmp) {
    nlohmann::ordered_json j;
    j["hub_count"] = cmp.hub_count;
    j["non_hub_count"] = cmp.non_hub_count;
    j["f1_hubs"] = cmp.f1_hubs_mean;
    j["f1_non_hubs"] = cmp.f1_non_hubs_mean;
    j["U"] = cmp.mwu.U;
    j["p_value"] = cmp.mwu.p_value;
    j["reject_null"] = cmp.mwu.reject_null;
    j["ps_hubs"] = cmp.mwu.ps_hubs;
    j["ps_non_hubs"] = cmp.mwu.ps_non_hubs;
    j["tie_rate"] = cmp.mwu.tie_rate;
    j["exact"] = cmp.mwu.exact;
    return j;
}

} // namespace detail

/// Full statistical report for one network: degree/quality correlations,
/// hub vs non-hub F1 comparison per snapshot and pooled over snapshots.
inline nlohmann::ordered_json build_stats_report(const SnapshotSequence& seq,
                                                 const std::vector<SnapshotScore>& results) {
    if (results.size() != seq.snapshots.size())
        throw std::invalid_argument("build_stats_report: result/sequence length mismatch");

    nlohmann::ordered_json report;
    auto corr = degree_quality_correlation(seq, results);
    report["correlations"] = {{"f1", corr.f1},
                              {"precision", corr.precision},
                              {"recall", corr.recall},
                              {"observations", corr.observations}};

    std::vector<double> pooled_hub_f1, pooled_non_hub_f1;
    report["per_snapshot"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto part = hub_partition(seq.snapshots[i]);
        std::vector<double> hub_f1, non_hub_f1;
        for (const auto& m : results[i].per_node) {
            bool is_hub = std::binary_search(part.hubs.begin(), part.hubs.end(), m.node);
            (is_hub ? hub_f1 : non_hub_f1).push_back(m.f1);
        }
        pooled_hub_f1.insert(pooled_hub_f1.end(), hub_f1.begin(), hub_f1.end());
        pooled_non_hub_f1.insert(pooled_non_hub_f1.end(), non_hub_f1.begin(), non_hub_f1.end());

        nlohmann::ordered_json entry;
        entry["snapshot"] = seq.snapshots[i].index;
        entry["hub_count"] = part.hubs.size();
        entry["non_hub_count"] = part.non_hubs.size();
        if (!hub_f1.empty() && !non_hub_f1.empty())
            entry.update(detail::hub_comparison_json(compare_f1_by_hubness(hub_f1, non_hub_f1)));
        else
            entry["note"] = "degenerate partition, comparison skipped";
        report["per_snapshot"].push_back(entry);
    }
    if (!pooled_hub_f1.empty() && !pooled_non_hub_f1.empty())
        report["pooled"] = detail::hub_comparison_json(compare_f1_by_hubness(pooled_hub_f1, pooled_non_hub_f1));
    return report;
}

} // namespace deephub
