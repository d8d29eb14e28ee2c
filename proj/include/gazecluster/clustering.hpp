#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazecluster/grid.hpp"
#include "gazecluster/similarity.hpp"

namespace gazecluster {

enum class Linkage { Single, Complete, Average };

std::string_view to_string(Linkage l) noexcept;
std::optional<Linkage> parse_linkage(std::string_view s) noexcept;

/// One agglomeration step in linkage-matrix convention: leaves are 0..p-1 and
/// merge j creates cluster p + j. `left` holds the subtree with the smaller
/// minimum leaf index.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::size_t leaf_count = 0;
    Linkage linkage = Linkage::Average;
    std::vector<Merge> merges;  // leaf_count - 1 entries
};

/// Greedy agglomeration over a symmetric distance matrix using a lazy-deletion
/// priority queue, O(p^2 log p). Among pairs at the same distance the one with
/// the smallest (min leaf of either cluster, min leaf of the other) wins.
/// Throws std::invalid_argument for p < 2 or a non-square matrix.
Dendrogram agglomerate(const Matrix& distances, Linkage linkage = Linkage::Average);
Dendrogram agglomerate(const DistanceMatrix& d, Linkage linkage = Linkage::Average);

struct ClusterLabels {
    std::size_t k = 0;
    /// labels[entity]; numbered 0..k-1 by first appearance in entity index order.
    std::vector<std::size_t> labels;
};

/// Undoes the last k - 1 merges. Throws std::out_of_range unless 1 <= k <= p.
ClusterLabels cut(const Dendrogram& dg, std::size_t k);

/// Left-to-right leaves.
std::vector<std::size_t> leaf_order(const Dendrogram& dg);

/// Positions j in [1, p) where the label of order[j] differs from order[j-1].
std::vector<std::size_t> group_boundaries(std::span<const std::size_t> order,
                                          const ClusterLabels& labels);

enum class CorrelationDistance {
    Signed,    // 1 - r
    Absolute,  // 1 - |r|
};

/// Average-linkage dendrogram over the metrics of a correlation matrix.
Dendrogram cluster_metrics(const CorrelationMatrix& c,
                           CorrelationDistance form = CorrelationDistance::Signed);

/// {"leaf_count", "linkage", "merges": [[left, right, height, size], ...]}
std::string dendrogram_json(const Dendrogram& dg);

}  // namespace gazecluster
