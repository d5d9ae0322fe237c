#pragma once

// Brute-force statistical oracles, deliberately written along different
// routes than the library implementations.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace test_support {

/// Exact two-sided Mann-Whitney p-value by enumerating every split of the
/// pooled sample, computing each U by direct pairwise comparison.
inline double mwu_exact_oracle_p(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t N = pooled.size();
    const std::size_t n = a.size();
    const double nm = static_cast<double>(n) * static_cast<double>(N - n);

    auto u_of = [](std::span<const double> x, std::span<const double> y) {
        double u = 0;
        for (double xi : x)
            for (double yj : y) {
                if (xi > yj)
                    u += 1.0;
                else if (xi == yj)
                    u += 0.5;
            }
        return u;
    };
    const double observed_dev = std::fabs(u_of(a, b) - nm / 2.0);

    std::vector<double> left, right;
    unsigned long long hits = 0, total = 0;
    std::function<void(std::size_t)> recurse = [&](std::size_t i) {
        if (left.size() > n || right.size() > N - n)
            return;
        if (i == N) {
            double dev = std::fabs(u_of(left, right) - nm / 2.0);
            if (dev >= observed_dev - 1e-12)
                ++hits;
            ++total;
            return;
        }
        left.push_back(pooled[i]);
        recurse(i + 1);
        left.pop_back();
        right.push_back(pooled[i]);
        recurse(i + 1);
        right.pop_back();
    };
    recurse(0);
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Rank-Pearson Spearman oracle: O(n^2) midranks by counting, then the
/// textbook product-moment formula on the ranks.
inline double spearman_oracle(std::span<const double> x, std::span<const double> y) {
    auto ranks = [](std::span<const double> v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::size_t less = 0, equal = 0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i])
                    ++less;
                else if (v[j] == v[i])
                    ++equal;
            }
            r[i] = static_cast<double>(less) + 1.0 + 0.5 * static_cast<double>(equal - 1);
        }
        return r;
    };
    auto rx = ranks(x);
    auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sx += rx[i];
        sy += ry[i];
        sxy += rx[i] * ry[i];
        sxx += rx[i] * rx[i];
        syy += ry[i] * ry[i];
    }
    double num = n * sxy - sx * sy;
    double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    return num / den;
}

} // namespace test_support
