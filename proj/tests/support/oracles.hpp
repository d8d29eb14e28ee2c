#pragma once

// Independent reference computations for tests. Deliberately naive and written
// straight from the metric / linkage definitions; nothing here calls into the
// library's computational code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Fix {
    double x, y, onset, duration;
};

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); i++) s = s + v[i];
    return s / v.size();
}

inline double central_moment(const std::vector<double>& v, int order) {
    const double mu = mean(v);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); i++) s = s + std::pow(v[i] - mu, order);
    return s / v.size();
}

inline bool all_equal(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); i++)
        if (v[i] != v[0]) return false;
    return true;
}

inline double pop_std(const std::vector<double>& v) {
    return all_equal(v) ? 0.0 : std::sqrt(central_moment(v, 2));
}

inline double skewness(const std::vector<double>& v) {
    if (all_equal(v)) return 0.0;
    return central_moment(v, 3) / std::pow(central_moment(v, 2), 1.5);
}

inline double excess_kurtosis(const std::vector<double>& v) {
    if (all_equal(v)) return 0.0;
    const double m2 = central_moment(v, 2);
    return central_moment(v, 4) / (m2 * m2) - 3.0;
}

/// Values in canonical metric order; NaN marks an undefined metric.
/// AvgFix AvgSac AvgSacDur KCoef FixNum FixRate SacNum SacRate ScanLen CompTime
/// StdX StdY SkewX SkewY KurtX KurtY
inline std::array<double, 16> metrics(const std::vector<Fix>& f) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 16> out;
    out.fill(nan);
    const std::size_t n = f.size();

    std::vector<double> durations, xs, ys, amplitudes, gaps;
    for (const auto& fx : f) {
        durations.push_back(fx.duration);
        xs.push_back(fx.x);
        ys.push_back(fx.y);
    }
    for (std::size_t i = 0; i + 1 < n; i++) {
        const double dx = f[i + 1].x - f[i].x, dy = f[i + 1].y - f[i].y;
        amplitudes.push_back(std::sqrt(dx * dx + dy * dy));
        const double gap = f[i + 1].onset - f[i].onset - f[i].duration;
        gaps.push_back(gap < 0 ? 0 : gap);
    }
    const double comp = f[n - 1].onset + f[n - 1].duration - f[0].onset;
    double scan = 0;
    for (double a : amplitudes) scan += a;

    out[0] = mean(durations);
    out[4] = n;
    out[5] = n / (comp / 1000.0);
    out[6] = n - 1.0;
    out[7] = (n - 1.0) / (comp / 1000.0);
    out[8] = scan;
    out[9] = comp;
    if (n >= 2) {
        out[1] = scan / (n - 1.0);
        out[2] = mean(gaps);
        const double md = mean(durations), sd = pop_std(durations);
        const double ma = mean(amplitudes), sa = pop_std(amplitudes);
        double k = 0;
        for (std::size_t i = 0; i + 1 < n; i++) {
            const double zd = sd == 0 ? 0 : (durations[i] - md) / sd;
            const double za = sa == 0 ? 0 : (amplitudes[i] - ma) / sa;
            k += zd - za;
        }
        out[3] = k / (n - 1.0);
        out[10] = pop_std(xs);
        out[11] = pop_std(ys);
    }
    if (n >= 3) {
        out[12] = skewness(xs);
        out[13] = skewness(ys);
        out[14] = excess_kurtosis(xs);
        out[15] = excess_kurtosis(ys);
    }
    return out;
}

struct OracleMerge {
    std::size_t left, right;  // cluster ids in linkage-matrix convention
    double height;
    std::size_t size;
};

enum class Link { Single, Complete, Average };

/// O(N^3) agglomeration: every step recomputes all inter-cluster distances
/// from the leaf sets. Ties go to the pair with the lexicographically
/// smallest (min leaf, min leaf).
inline std::vector<OracleMerge> naive_linkage(const std::vector<std::vector<double>>& d, Link link) {
    const std::size_t p = d.size();
    struct Cluster {
        std::size_t id;
        std::vector<std::size_t> leaves;
    };
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < p; i++) active.push_back({i, {i}});

    auto dist = [&](const Cluster& a, const Cluster& b) {
        double best = link == Link::Single ? std::numeric_limits<double>::infinity() : 0.0;
        double sum = 0;
        for (auto x : a.leaves)
            for (auto y : b.leaves) {
                if (link == Link::Single) best = std::min(best, d[x][y]);
                if (link == Link::Complete) best = std::max(best, d[x][y]);
                sum += d[x][y];
            }
        if (link == Link::Average) return sum / double(a.leaves.size() * b.leaves.size());
        return best;
    };
    auto min_leaf = [](const Cluster& c) { return *std::min_element(c.leaves.begin(), c.leaves.end()); };

    std::vector<OracleMerge> merges;
    std::size_t next_id = p;
    while (active.size() > 1) {
        std::size_t best_a = 0, best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::size_t, std::size_t> best_key{p, p};
        for (std::size_t a = 0; a < active.size(); a++)
            for (std::size_t b = a + 1; b < active.size(); b++) {
                const double v = dist(active[a], active[b]);
                auto ka = min_leaf(active[a]), kb = min_leaf(active[b]);
                std::pair<std::size_t, std::size_t> key{std::min(ka, kb), std::max(ka, kb)};
                if (v < best || (v == best && key < best_key)) {
                    best = v;
                    best_key = key;
                    best_a = a;
                    best_b = b;
                }
            }
        Cluster& A = active[best_a];
        Cluster& B = active[best_b];
        const bool a_first = min_leaf(A) < min_leaf(B);
        const Cluster& L = a_first ? A : B;
        const Cluster& R = a_first ? B : A;
        Cluster merged{next_id++, L.leaves};
        merged.leaves.insert(merged.leaves.end(), R.leaves.begin(), R.leaves.end());
        merges.push_back({L.id, R.id, best, merged.leaves.size()});
        active.erase(active.begin() + best_b);
        active.erase(active.begin() + best_a);
        active.push_back(merged);
    }
    return merges;
}

/// Adjusted Rand index of two labelings.
inline double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::map<std::pair<std::size_t, std::size_t>, double> table;
    std::map<std::size_t, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); i++) {
        table[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double n) { return n * (n - 1) / 2; };
    double index = 0, sa = 0, sb = 0;
    for (auto& [k, v] : table) index += c2(v);
    for (auto& [k, v] : ra) sa += c2(v);
    for (auto& [k, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(a.size());
    const double max_index = (sa + sb) / 2;
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace oracle
