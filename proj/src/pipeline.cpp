#include "gazecluster/pipeline.hpp"

#include <stdexcept>

namespace gazecluster {

ClusterResult run_clustering(const MetricTable& t, const ClusterRequest& request) {
    if (!t.normalized) throw std::invalid_argument("run_clustering: table is not normalized");
    request.weights.validate();
    ClusterResult out;
    const auto distances = combined_distance(t, request.weights, request.form);
    out.dendrogram = agglomerate(distances, request.linkage);
    out.leaf_order = leaf_order(out.dendrogram);
    if (request.k) {
        out.labels = cut(out.dendrogram, *request.k);
        out.boundaries = group_boundaries(out.leaf_order, *out.labels);
    }
    out.w_avg = merge_metrics(t, request.weights);
    return out;
}

std::vector<MetricId> metric_slot_order(const MetricTable& t, CorrelationDistance form) {
    if (t.size() < 3) return {kAllMetrics.begin(), kAllMetrics.end()};
    const auto corr = metric_correlations(t);
    const auto dg = cluster_metrics(corr, form);
    std::vector<MetricId> order;
    for (auto leaf : leaf_order(dg)) order.push_back(corr.metrics[leaf]);
    return order;
}

MatrixLayout build_dssm(const MetricTable& t, std::span<const std::size_t> entity_order,
                        std::vector<std::size_t> boundaries, const MatrixOptions& options) {
    const auto tensor = pairwise_similarity(t, Scale::Normalized);
    const auto slots = metric_slot_order(t, options.metric_distance);
    const auto sub = assign_subgrid(slots, hilbert_order_for(slots.size()));
    auto spec = assign_colors(slots.size());
    spec.chroma = options.chroma;
    spec.invert = options.invert_lightness;
    spec = bind_hues(std::move(spec), sub.slot_metrics);
    return build_matrix_layout(tensor, entity_order, sub, spec, std::move(boundaries));
}

}  // namespace gazecluster
