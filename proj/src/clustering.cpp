#include "gazecluster/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

namespace gazecluster {

namespace {

// Candidate merge of the clusters whose minimum leaves are `lo` < `hi`.
// Clusters are addressed by their minimum leaf, which never changes for the
// surviving side of a merge; `stamp_*` detect stale entries.
struct Candidate {
    double distance;
    std::size_t lo;
    std::size_t hi;
    std::size_t stamp_lo;
    std::size_t stamp_hi;

    bool operator>(const Candidate& o) const {
        return std::tie(distance, lo, hi) > std::tie(o.distance, o.lo, o.hi);
    }
};

}  // namespace

std::string_view to_string(Linkage l) noexcept {
    switch (l) {
        case Linkage::Single: return "single";
        case Linkage::Complete: return "complete";
        case Linkage::Average: return "average";
    }
    return "average";
}

std::optional<Linkage> parse_linkage(std::string_view s) noexcept {
    if (s == "single") return Linkage::Single;
    if (s == "complete") return Linkage::Complete;
    if (s == "average") return Linkage::Average;
    return std::nullopt;
}

Dendrogram agglomerate(const Matrix& distances, Linkage linkage) {
    const auto p = distances.rows();
    if (distances.cols() != p) throw std::invalid_argument("agglomerate: distance matrix not square");
    if (p < 2) throw std::invalid_argument("agglomerate: need at least 2 entities");
    for (double v : distances.data())
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("agglomerate: distances must be finite and nonnegative");

    // Single/complete keep the linkage distance itself; average keeps the sum
    // of leaf-pair distances so repeated merges add exactly.
    Matrix link = distances;
    std::vector<std::size_t> size(p, 1);
    std::vector<std::size_t> cluster_id(p);
    std::iota(cluster_id.begin(), cluster_id.end(), 0);
    std::vector<std::size_t> stamp(p, 0);
    std::vector<bool> active(p, true);

    auto distance_of = [&](std::size_t a, std::size_t b) {
        const double v = link(a, b);
        return linkage == Linkage::Average ? v / static_cast<double>(size[a] * size[b]) : v;
    };

    std::vector<Candidate> initial;
    initial.reserve(p * (p - 1) / 2);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) initial.push_back({distance_of(a, b), a, b, 0, 0});
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue(
        std::greater<>{}, std::move(initial));

    Dendrogram dg;
    dg.leaf_count = p;
    dg.linkage = linkage;
    dg.merges.reserve(p - 1);

    while (dg.merges.size() + 1 < p) {
        const Candidate c = queue.top();
        queue.pop();
        if (!active[c.lo] || !active[c.hi] || stamp[c.lo] != c.stamp_lo || stamp[c.hi] != c.stamp_hi)
            continue;

        const std::size_t keep = c.lo;
        const std::size_t gone = c.hi;
        dg.merges.push_back({cluster_id[keep], cluster_id[gone], c.distance, size[keep] + size[gone]});

        for (std::size_t k = 0; k < p; ++k) {
            if (!active[k] || k == keep || k == gone) continue;
            double v = 0.0;
            switch (linkage) {
                case Linkage::Single: v = std::min(link(k, keep), link(k, gone)); break;
                case Linkage::Complete: v = std::max(link(k, keep), link(k, gone)); break;
                case Linkage::Average: v = link(k, keep) + link(k, gone); break;
            }
            link(k, keep) = v;
            link(keep, k) = v;
        }
        active[gone] = false;
        size[keep] += size[gone];
        cluster_id[keep] = p + dg.merges.size() - 1;
        ++stamp[keep];

        for (std::size_t k = 0; k < p; ++k) {
            if (!active[k] || k == keep) continue;
            const auto lo = std::min(k, keep);
            const auto hi = std::max(k, keep);
            queue.push({distance_of(lo, hi), lo, hi, stamp[lo], stamp[hi]});
        }
    }
    return dg;
}

Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage) {
    return agglomerate(d.values, linkage);
}

ClusterLabels cut(const Dendrogram& dg, std::size_t k) {
    const auto p = dg.leaf_count;
    if (k < 1 || k > p)
        throw std::out_of_range(fmt::format("cut: k = {} outside [1, {}]", k, p));

    // Union-find over the first p - k merges.
    std::vector<std::size_t> parent(2 * p - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t j = 0; j + k < p; ++j) {
        const auto& m = dg.merges[j];
        parent[find(m.left)] = p + j;
        parent[find(m.right)] = p + j;
    }

    ClusterLabels out;
    out.k = k;
    out.labels.resize(p);
    std::vector<std::size_t> label_of_root(2 * p - 1, static_cast<std::size_t>(-1));
    std::size_t next = 0;
    for (std::size_t e = 0; e < p; ++e) {
        auto& label = label_of_root[find(e)];
        if (label == static_cast<std::size_t>(-1)) label = next++;
        out.labels[e] = label;
    }
    return out;
}

std::vector<std::size_t> leaf_order(const Dendrogram& dg) {
    const auto p = dg.leaf_count;
    std::vector<std::size_t> order;
    if (p == 0) return order;
    order.reserve(p);
    std::vector<std::size_t> stack{dg.merges.empty() ? 0 : 2 * p - 2};
    while (!stack.empty()) {
        const auto node = stack.back();
        stack.pop_back();
        if (node < p) {
            order.push_back(node);
            continue;
        }
        const auto& m = dg.merges[node - p];
        stack.push_back(m.right);
        stack.push_back(m.left);
    }
    return order;
}

std::vector<std::size_t> group_boundaries(std::span<const std::size_t> order,
                                          const ClusterLabels& labels) {
    std::vector<std::size_t> out;
    for (std::size_t j = 1; j < order.size(); ++j)
        if (labels.labels.at(order[j]) != labels.labels.at(order[j - 1])) out.push_back(j);
    return out;
}

Dendrogram cluster_metrics(const CorrelationMatrix& c, CorrelationDistance form) {
    const auto n = c.metrics.size();
    Matrix d(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const double r = c.values(a, b);
            d(a, b) = std::max(0.0, form == CorrelationDistance::Signed ? 1.0 - r : 1.0 - std::abs(r));
        }
    return agglomerate(d, Linkage::Average);
}

std::string dendrogram_json(const Dendrogram& dg) {
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : dg.merges) merges.push_back({m.left, m.right, m.height, m.size});
    nlohmann::json j;
    j["leaf_count"] = dg.leaf_count;
    j["linkage"] = to_string(dg.linkage);
    j["merges"] = std::move(merges);
    return j.dump();
}

}  // namespace gazecluster
