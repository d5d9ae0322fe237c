#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "deephub/stats.hpp"
#include "support/stats_oracles.hpp"
#include "support/test_graphs.hpp"

using namespace deephub;

namespace {

long long degree_sum(const Snapshot& snap, const std::vector<NodeId>& nodes) {
    long long sum = 0;
    for (NodeId v : nodes)
        sum += degree(snap, v);
    return sum;
}

/// Exhaustive prefix check of the hub definition: the returned hub set must
/// be the shortest degree-ordered prefix with strict majority of degree.
void check_hub_minimality(const Snapshot& snap, const HubPartition& part) {
    std::vector<NodeId> order = snap.nodes;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (snap.adj[a].size() != snap.adj[b].size())
            return snap.adj[a].size() > snap.adj[b].size();
        return a < b;
    });
    long long total = degree_sum(snap, order);
    std::size_t minimal = order.size();
    long long acc = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        acc += degree(snap, order[k]);
        if (acc > total - acc) {
            minimal = k + 1;
            break;
        }
    }
    REQUIRE(part.hubs.size() == minimal);

    std::vector<NodeId> expected(order.begin(), order.begin() + minimal);
    std::sort(expected.begin(), expected.end());
    REQUIRE(part.hubs == expected);

    long long hub_sum = degree_sum(snap, part.hubs);
    long long rest_sum = degree_sum(snap, part.non_hubs);
    REQUIRE(hub_sum > rest_sum);

    // dropping the lowest-degree hub breaks the strict inequality
    auto lowest = *std::min_element(part.hubs.begin(), part.hubs.end(), [&](NodeId a, NodeId b) {
        return snap.adj[a].size() < snap.adj[b].size();
    });
    long long without = hub_sum - degree(snap, lowest);
    REQUIRE_FALSE(without > rest_sum + degree(snap, lowest));
}

} // namespace

TEST_CASE("hub partition on the worked shapes") {
    auto path = test_support::path3(); // degrees 1,2,1
    auto part = hub_partition(path);
    CHECK(part.hubs == std::vector<NodeId>{0, 1}); // {b} is not enough: 2 > 2 fails
    CHECK(part.non_hubs == std::vector<NodeId>{2});

    auto star = test_support::star(4); // degrees 4,1,1,1,1
    part = hub_partition(star);
    CHECK(part.hubs.size() == 2); // 4 > 4 fails, add one leaf: 5 > 3
    CHECK(part.hubs == std::vector<NodeId>{0, 1});

    auto tri = test_support::triangle();
    part = hub_partition(tri);
    CHECK(part.hubs.size() == 2); // 2 > 4 fails, 4 > 2 holds
}

TEST_CASE("hub partition satisfies minimality on random graphs") {
    Rng rng(5150);
    check_hub_minimality(test_support::path3(), hub_partition(test_support::path3()));
    check_hub_minimality(test_support::star(4), hub_partition(test_support::star(4)));
    check_hub_minimality(test_support::triangle(), hub_partition(test_support::triangle()));
    check_hub_minimality(test_support::single_edge(), hub_partition(test_support::single_edge()));
    for (int round = 0; round < 30; ++round) {
        auto snap = test_support::random_connected(rng, 5 + static_cast<int>(rng.below(46)), 1.4);
        check_hub_minimality(snap, hub_partition(snap));
    }
}

TEST_CASE("hub partition size is invariant under relabeling") {
    Rng rng(5151);
    for (int round = 0; round < 10; ++round) {
        int n = 6 + static_cast<int>(rng.below(20));
        auto snap = test_support::random_connected(rng, n, 1.2);
        auto part = hub_partition(snap);

        // random permutation of the dense ids
        std::vector<NodeId> perm(snap.adj.size());
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId v : snap.nodes)
            for (NodeId w : snap.adj[v])
                if (v < w)
                    edges.push_back({perm[v], perm[w]});
        auto relabeled = Snapshot::from_edges(1, edges);
        auto part2 = hub_partition(relabeled);

        CHECK(part.hubs.size() == part2.hubs.size());
        auto degrees_of = [](const Snapshot& s, const std::vector<NodeId>& nodes) {
            std::vector<std::size_t> degs;
            for (NodeId v : nodes)
                degs.push_back(s.adj[v].size());
            std::sort(degs.begin(), degs.end());
            return degs;
        };
        CHECK(degrees_of(snap, part.hubs) == degrees_of(relabeled, part2.hubs));
    }
}

TEST_CASE("spearman on monotone sequences") {
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == Catch::Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{30, 20, 10}) == Catch::Approx(-1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 1, 4, 3}) == Catch::Approx(0.6));
}

TEST_CASE("spearman rejects degenerate input") {
    CHECK_THROWS_WITH(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                      Catch::Matchers::ContainsSubstring("undefined correlation"));
    CHECK_THROWS_WITH(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}),
                      Catch::Matchers::ContainsSubstring("undefined correlation"));
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
    CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("spearman matches the rank-Pearson oracle, ties included") {
    Rng rng(11);
    for (int round = 0; round < 20; ++round) {
        std::size_t n = 3 + rng.below(12);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse integer values produce frequent ties
            x[i] = static_cast<double>(rng.below(5));
            y[i] = static_cast<double>(rng.below(5));
        }
        auto constant = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
        };
        if (constant(x) || constant(y))
            continue;
        CHECK(spearman(x, y) == Catch::Approx(test_support::spearman_oracle(x, y)).margin(1e-12));
    }
}

TEST_CASE("spearman is symmetric and monotone-transform invariant") {
    Rng rng(12);
    std::vector<double> x(15), y(15);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform01() * 10;
        y[i] = rng.uniform01() * 10;
    }
    CHECK(spearman(x, y) == Catch::Approx(spearman(y, x)).margin(1e-14));

    std::vector<double> x_exp(x.size()), y_cube(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x_exp[i] = std::exp(x[i]);          // strictly increasing
        y_cube[i] = y[i] * y[i] * y[i] + 2; // strictly increasing
    }
    CHECK(spearman(x_exp, y_cube) == Catch::Approx(spearman(x, y)).margin(1e-12));
}

TEST_CASE("mann-whitney on the worked two-by-two example") {
    std::vector<double> a{1, 2}, b{3, 4};
    auto result = mann_whitney_u(a, b);
    CHECK(result.U == 0.0);
    CHECK(result.ps_hubs == 0.0);
    CHECK(result.ps_non_hubs == 1.0);
    CHECK(result.exact);
    CHECK(result.p_value == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK_FALSE(result.reject_null);
}

TEST_CASE("identical samples split the statistic evenly") {
    std::vector<double> a{1, 2, 2, 5}, b{1, 2, 2, 5};
    auto result = mann_whitney_u(a, b);
    CHECK(result.U == Catch::Approx(a.size() * b.size() / 2.0));
    CHECK(result.ps_hubs == result.ps_non_hubs);
    CHECK(result.p_value == Catch::Approx(1.0));
}

TEST_CASE("mann-whitney symmetry identities") {
    Rng rng(13);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> a(1 + rng.below(8)), b(1 + rng.below(8));
        for (double& v : a)
            v = static_cast<double>(rng.below(6));
        for (double& v : b)
            v = static_cast<double>(rng.below(6));
        auto ab = mann_whitney_u(a, b);
        auto ba = mann_whitney_u(b, a);
        CHECK(ab.U + ba.U == Catch::Approx(static_cast<double>(a.size() * b.size())));
        CHECK(ab.ps_hubs == Catch::Approx(ba.ps_non_hubs));
        CHECK(ab.ps_non_hubs == Catch::Approx(ba.ps_hubs));
        CHECK(ab.p_value == Catch::Approx(ba.p_value).margin(1e-12));
        CHECK(ab.ps_hubs + ab.ps_non_hubs <= 1.0 + 1e-12);
    }
}

TEST_CASE("exact p-values match the enumeration oracle") {
    Rng rng(14);
    for (int round = 0; round < 25; ++round) {
        std::size_t n = 1 + rng.below(5), m = 1 + rng.below(5);
        std::vector<double> a(n), b(m);
        bool with_ties = round % 2 == 0;
        for (double& v : a)
            v = with_ties ? static_cast<double>(rng.below(4)) : rng.uniform01();
        for (double& v : b)
            v = with_ties ? static_cast<double>(rng.below(4)) : rng.uniform01();
        auto result = mann_whitney_u(a, b);
        REQUIRE(result.exact);
        CHECK(result.p_value == Catch::Approx(test_support::mwu_exact_oracle_p(a, b)).margin(1e-9));
    }
}

TEST_CASE("normal approximation stays near the exact answer on small samples") {
    Rng rng(15);
    for (int round = 0; round < 20; ++round) {
        std::size_t n = 3 + rng.below(4), m = 3 + rng.below(4);
        std::vector<double> a(n), b(m);
        for (double& v : a)
            v = rng.uniform01(); // continuous, no ties
        for (double& v : b)
            v = rng.uniform01();
        auto exact = mann_whitney_u(a, b);
        REQUIRE(exact.exact);
        double approx = deephub::detail::mwu_normal_p(a, b, exact.U);
        CHECK(std::fabs(approx - exact.p_value) < 0.05);
    }
}

TEST_CASE("mann-whitney rejects empty samples") {
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{1.0}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("degree-quality correlation pools snapshots") {
    // two snapshots of the same star: higher degree always scores higher
    auto star = test_support::star(3);
    auto star2 = star;
    star2.index = 2;
    SnapshotSequence seq{{star, star2}, {}};

    std::vector<SnapshotScore> results(2);
    for (std::size_t s = 0; s < 2; ++s) {
        results[s].snapshot_index = static_cast<int>(s + 1);
        for (NodeId v : seq.snapshots[s].nodes) {
            NodeMetrics m;
            m.node = v;
            double deg = static_cast<double>(degree(seq.snapshots[s], v));
            m.f1 = deg / 10.0;
            m.precision = deg / 20.0;
            m.recall = deg / 30.0;
            results[s].per_node.push_back(m);
        }
    }
    auto corr = degree_quality_correlation(seq, results);
    CHECK(corr.observations == 8);
    CHECK(corr.f1 == Catch::Approx(1.0));
    CHECK(corr.precision == Catch::Approx(1.0));
    CHECK(corr.recall == Catch::Approx(1.0));

    // constant quality surfaces the degenerate-correlation error
    for (auto& r : results)
        for (auto& m : r.per_node)
            m.f1 = 0.5;
    CHECK_THROWS_WITH(degree_quality_correlation(seq, results),
                      Catch::Matchers::ContainsSubstring("undefined correlation"));
}

TEST_CASE("stats report carries correlations and pooled hub comparison") {
    Rng rng(16);
    auto snap = test_support::random_connected(rng, 25, 1.5);
    SnapshotSequence seq{{snap}, {}};
    std::vector<SnapshotScore> results(1);
    results[0].snapshot_index = 1;
    for (NodeId v : snap.nodes) {
        NodeMetrics m;
        m.node = v;
        m.f1 = rng.uniform01();
        m.precision = rng.uniform01();
        m.recall = rng.uniform01();
        results[0].per_node.push_back(m);
    }
    auto report = build_stats_report(seq, results);
    REQUIRE(report.contains("correlations"));
    REQUIRE(report.contains("pooled"));
    REQUIRE(report["per_snapshot"].size() == 1);
    auto part = hub_partition(snap);
    CHECK(report["pooled"]["hub_count"].get<std::size_t>() == part.hubs.size());
    CHECK(report["pooled"]["ps_hubs"].get<double>() >= 0.0);
    CHECK(report["pooled"]["p_value"].get<double>() <= 1.0);
}
