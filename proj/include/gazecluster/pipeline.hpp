#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gazecluster/clustering.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/metrics.hpp"
#include "gazecluster/similarity.hpp"

namespace gazecluster {

struct ClusterRequest {
    WeightVector weights;
    Linkage linkage = Linkage::Average;
    std::optional<std::size_t> k;
    CombineForm form = CombineForm::WeightedSum;
};

struct ClusterResult {
    Dendrogram dendrogram;
    std::vector<std::size_t> leaf_order;
    std::optional<ClusterLabels> labels;
    std::vector<std::size_t> boundaries;  // along leaf_order
    std::vector<double> w_avg;            // merged metric per entity, table order
};

/// combined_distance -> agglomerate -> leaf_order (+ cut). Table must be normalized.
ClusterResult run_clustering(const MetricTable& t, const ClusterRequest& request);

struct MatrixOptions {
    double chroma = 13.0;
    bool invert_lightness = false;
    CorrelationDistance metric_distance = CorrelationDistance::Signed;
};

/// Metric order for the sub-grids: leaf order of the metric-correlation
/// dendrogram, or canonical order when fewer than 3 entities exist.
std::vector<MetricId> metric_slot_order(const MetricTable& t, CorrelationDistance form);

/// Full DSSM for a normalized table under the given entity order.
MatrixLayout build_dssm(const MetricTable& t, std::span<const std::size_t> entity_order,
                        std::vector<std::size_t> boundaries = {}, const MatrixOptions& options = {});

}  // namespace gazecluster
