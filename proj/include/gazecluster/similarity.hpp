#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gazecluster/grid.hpp"
#include "gazecluster/metrics.hpp"

namespace gazecluster {

enum class Scale { Normalized, Raw };

/// p × p × n per-metric distances |v_ik - v_lk|, stored so that the n values
/// of one entity pair are contiguous.
struct SimilarityTensor {
    std::size_t entity_count = 0;
    std::vector<std::string> entity_order;
    std::vector<MetricId> metric_order;
    std::vector<double> values;

    std::size_t metric_count() const noexcept { return metric_order.size(); }
    double at(std::size_t i, std::size_t l, std::size_t k) const noexcept {
        return values[(i * entity_count + l) * metric_order.size() + k];
    }
    std::span<const double> pair(std::size_t i, std::size_t l) const noexcept {
        const auto n = metric_order.size();
        return {values.data() + (i * entity_count + l) * n, n};
    }
    /// Position of a metric in metric_order; throws if absent.
    std::size_t metric_position(MetricId m) const;
    Matrix slice(MetricId m) const;
};

/// Throws std::invalid_argument on non-finite cells or when normalized values are requested
/// from an unnormalized table.
SimilarityTensor pairwise_similarity(const MetricTable& t, Scale scale = Scale::Normalized);

/// How per-metric distances combine under a weight vector.
enum class CombineForm {
    WeightedSum,       // sum_k w_k |dv_k|
    WeightedEuclidean, // sqrt(sum_k (w_k dv_k)^2)
};

struct DistanceMatrix {
    std::vector<std::string> entities;
    Matrix values;
    std::string provenance;  // canonical weight key or a metric name
};

DistanceMatrix combined_distance(const SimilarityTensor& tensor, const WeightVector& w,
                                 CombineForm form = CombineForm::WeightedSum);
/// Normalized table required.
DistanceMatrix combined_distance(const MetricTable& t, const WeightVector& w,
                                 CombineForm form = CombineForm::WeightedSum);

struct CorrelationMatrix {
    std::vector<MetricId> metrics;
    Matrix values;  // Pearson r, unit diagonal
    std::vector<std::string> warnings;
};

/// Pearson correlation between metric columns over entities. Constant columns
/// correlate 0 with everything else. Throws for fewer than 3 entities.
CorrelationMatrix metric_correlations(const MetricTable& t);

std::string tensor_json(const SimilarityTensor& tensor);
std::string distance_matrix_csv(const DistanceMatrix& d);
std::string correlation_csv(const CorrelationMatrix& c);

std::string_view to_string(CombineForm form) noexcept;
std::optional<CombineForm> parse_combine_form(std::string_view s) noexcept;

}  // namespace gazecluster
