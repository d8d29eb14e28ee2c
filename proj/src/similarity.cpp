#include "gazecluster/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "gazecluster/kernels.hpp"
#include "gazecluster/text.hpp"

namespace gazecluster {

std::size_t SimilarityTensor::metric_position(MetricId m) const {
    auto it = std::find(metric_order.begin(), metric_order.end(), m);
    if (it == metric_order.end())
        throw std::invalid_argument(fmt::format("metric {} not in tensor", metric_name(m)));
    return static_cast<std::size_t>(it - metric_order.begin());
}

Matrix SimilarityTensor::slice(MetricId m) const {
    const auto k = metric_position(m);
    Matrix out(entity_count, entity_count);
    for (std::size_t i = 0; i < entity_count; ++i)
        for (std::size_t l = 0; l < entity_count; ++l) out(i, l) = at(i, l, k);
    return out;
}

SimilarityTensor pairwise_similarity(const MetricTable& t, Scale scale) {
    if (scale == Scale::Normalized && !t.normalized)
        throw std::invalid_argument("pairwise_similarity: table is not normalized");
    const Matrix& values = scale == Scale::Normalized ? *t.normalized : t.raw;
    for (double v : values.data())
        if (!std::isfinite(v)) throw std::invalid_argument("pairwise_similarity: masked or non-finite cell");

    SimilarityTensor out;
    out.entity_count = t.size();
    out.entity_order = t.entities;
    out.metric_order.assign(kAllMetrics.begin(), kAllMetrics.end());
    out.values = kernels::omp::pairwise_abs_diff(values);
    return out;
}

DistanceMatrix combined_distance(const SimilarityTensor& tensor, const WeightVector& w,
                                 CombineForm form) {
    w.validate();
    std::vector<double> weights(tensor.metric_count());
    for (std::size_t k = 0; k < tensor.metric_count(); ++k) weights[k] = w[tensor.metric_order[k]];
    DistanceMatrix out;
    out.entities = tensor.entity_order;
    out.values = kernels::omp::weighted_combine(tensor.values, tensor.entity_count, weights, form);
    out.provenance = w.canonical_key();
    return out;
}

DistanceMatrix combined_distance(const MetricTable& t, const WeightVector& w, CombineForm form) {
    if (!t.normalized) throw std::invalid_argument("combined_distance: table is not normalized");
    w.validate();
    return combined_distance(pairwise_similarity(t, Scale::Normalized), w, form);
}

CorrelationMatrix metric_correlations(const MetricTable& t) {
    const auto p = t.size();
    if (p < 3) throw std::invalid_argument("metric_correlations: need at least 3 entities");
    const auto& v = t.raw;

    std::array<double, kMetricCount> mean{};
    std::array<double, kMetricCount> ss{};
    std::array<bool, kMetricCount> constant{};
    for (std::size_t k = 0; k < kMetricCount; ++k) {
        double sum = 0.0;
        bool same = true;
        for (std::size_t r = 0; r < p; ++r) {
            sum += v(r, k);
            same = same && v(r, k) == v(0, k);
        }
        mean[k] = sum / static_cast<double>(p);
        for (std::size_t r = 0; r < p; ++r) ss[k] += (v(r, k) - mean[k]) * (v(r, k) - mean[k]);
        constant[k] = same || ss[k] == 0.0;
    }

    CorrelationMatrix out;
    out.metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
    out.values = Matrix(kMetricCount, kMetricCount);
    for (std::size_t k = 0; k < kMetricCount; ++k)
        if (constant[k])
            out.warnings.push_back(fmt::format("metric {} is constant; correlations set to 0",
                                               metric_name(kAllMetrics[k])));
    for (std::size_t a = 0; a < kMetricCount; ++a) {
        out.values(a, a) = 1.0;
        for (std::size_t b = a + 1; b < kMetricCount; ++b) {
            double r = 0.0;
            if (!constant[a] && !constant[b]) {
                double cross = 0.0;
                for (std::size_t i = 0; i < p; ++i)
                    cross += (v(i, a) - mean[a]) * (v(i, b) - mean[b]);
                r = std::clamp(cross / std::sqrt(ss[a] * ss[b]), -1.0, 1.0);
            }
            out.values(a, b) = r;
            out.values(b, a) = r;
        }
    }
    return out;
}

std::string tensor_json(const SimilarityTensor& tensor) {
    nlohmann::json j;
    j["entity_order"] = tensor.entity_order;
    std::vector<std::string> metrics;
    for (auto m : tensor.metric_order) metrics.emplace_back(metric_name(m));
    j["metric_order"] = metrics;
    j["shape"] = {tensor.entity_count, tensor.entity_count, tensor.metric_count()};
    j["values"] = tensor.values;
    return j.dump();
}

std::string distance_matrix_csv(const DistanceMatrix& d) {
    std::string out = "entity";
    for (const auto& e : d.entities) out += "," + text::csv_field(e);
    out += '\n';
    for (std::size_t i = 0; i < d.entities.size(); ++i) {
        out += text::csv_field(d.entities[i]);
        for (std::size_t l = 0; l < d.entities.size(); ++l)
            out += "," + text::format_double(d.values(i, l));
        out += '\n';
    }
    return out;
}

std::string correlation_csv(const CorrelationMatrix& c) {
    std::string out = "metric";
    for (auto m : c.metrics) out += fmt::format(",{}", metric_name(m));
    out += '\n';
    for (std::size_t a = 0; a < c.metrics.size(); ++a) {
        out += metric_name(c.metrics[a]);
        for (std::size_t b = 0; b < c.metrics.size(); ++b)
            out += "," + text::format_double(c.values(a, b));
        out += '\n';
    }
    return out;
}

std::string_view to_string(CombineForm form) noexcept {
    return form == CombineForm::WeightedSum ? "sum" : "euclidean";
}

std::optional<CombineForm> parse_combine_form(std::string_view s) noexcept {
    if (s == "sum") return CombineForm::WeightedSum;
    if (s == "euclidean") return CombineForm::WeightedEuclidean;
    return std::nullopt;
}

}  // namespace gazecluster
