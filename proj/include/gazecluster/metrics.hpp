#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazecluster/grid.hpp"
#include "gazecluster/ingest.hpp"

namespace gazecluster {

/// The 16 gaze metrics in canonical order.
enum class MetricId : std::size_t {
    AvgFix,
    AvgSac,
    AvgSacDur,
    KCoef,
    FixNum,
    FixRate,
    SacNum,
    SacRate,
    ScanLen,
    CompTime,
    StdX,
    StdY,
    SkewX,
    SkewY,
    KurtX,
    KurtY,
};

inline constexpr std::size_t kMetricCount = 16;

inline constexpr std::array<MetricId, kMetricCount> kAllMetrics = {
    MetricId::AvgFix, MetricId::AvgSac,  MetricId::AvgSacDur, MetricId::KCoef,
    MetricId::FixNum, MetricId::FixRate, MetricId::SacNum,    MetricId::SacRate,
    MetricId::ScanLen, MetricId::CompTime, MetricId::StdX,    MetricId::StdY,
    MetricId::SkewX,  MetricId::SkewY,   MetricId::KurtX,     MetricId::KurtY,
};

constexpr std::size_t index_of(MetricId m) noexcept { return static_cast<std::size_t>(m); }

std::string_view metric_name(MetricId m) noexcept;
std::optional<MetricId> parse_metric(std::string_view name) noexcept;

/// Population moments; skewness = m3/m2^1.5, kurtosis = m4/m2^2 - 3.
struct MomentSummary {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

/// Throws std::invalid_argument on empty input. Zero variance yields
/// skewness = kurtosis = 0.
MomentSummary moments(std::span<const double> xs);

/// Saccade amplitude i: distance between fixation i and i+1 centroids.
std::vector<double> saccade_amplitudes(const Scanpath& s);

/// Location and spread used to z-score durations and amplitudes for K.
struct KReference {
    double duration_mean = 0.0;
    double duration_std = 0.0;
    double amplitude_mean = 0.0;
    double amplitude_std = 0.0;
};

/// Mean over consecutive pairs of z(duration_i) - z(amplitude of saccade leaving i).
/// Durations are standardized over all fixations of the scanpath, amplitudes
/// over all its saccades; a zero spread makes that z term 0. Note that with
/// per-scanpath standardization the result equals -z(last duration) / (n - 1).
/// Returns nullopt for fewer than 2 fixations.
std::optional<double> k_coefficient(const Scanpath& s);

/// Same, standardized against an external reference (e.g. the whole dataset).
std::optional<double> k_coefficient(const Scanpath& s, const KReference& reference);

/// Pooled duration/amplitude statistics over every scanpath of a dataset.
KReference dataset_k_reference(const Dataset& d);

struct MetricVector {
    std::array<double, kMetricCount> values{};
    std::array<bool, kMetricCount> defined{};

    std::optional<double> get(MetricId m) const {
        return defined[index_of(m)] ? std::optional(values[index_of(m)]) : std::nullopt;
    }
};

/// All metrics of one scanpath. Undefined entries are masked, never zero:
/// AvgSac, AvgSacDur, KCoef and StdX/StdY need 2 fixations, skewness and
/// kurtosis need 3.
MetricVector scanpath_metrics(const Scanpath& s);
MetricVector scanpath_metrics(const Scanpath& s, const KReference* k_reference);

enum class AggregateRule { Mean, Median };

/// Standardization basis of the K coefficient.
enum class KBasis { Scanpath, Dataset };

struct AggregateOptions {
    AggregateRule rule = AggregateRule::Mean;
    KBasis k_basis = KBasis::Scanpath;
};

std::optional<AggregateRule> parse_aggregate_rule(std::string_view s) noexcept;
std::optional<KBasis> parse_k_basis(std::string_view s) noexcept;

/// Entities × 16 metrics, with an optional min-max normalized copy and
/// derived (merged) columns appended after the canonical 16.
struct MetricTable {
    struct DerivedColumn {
        std::string name;
        std::vector<double> values;
    };

    std::vector<std::string> entities;
    Matrix raw;                       // p × 16
    std::optional<Matrix> normalized; // p × 16, in [0,1]
    Grid<int> support;                // scanpaths contributing to each cell
    std::vector<DerivedColumn> derived;

    std::size_t size() const noexcept { return entities.size(); }
    bool is_normalized() const noexcept { return normalized.has_value(); }
};

struct AggregateResult {
    MetricTable table;
    std::vector<std::string> dropped;   // entities removed for an all-masked metric
    std::vector<std::string> warnings;
};

/// One row per entity along the dataset's axis. Throws on an empty dataset.
AggregateResult aggregate(const Dataset& d, const AggregateOptions& options);
inline AggregateResult aggregate(const Dataset& d, AggregateRule rule = AggregateRule::Mean) {
    return aggregate(d, AggregateOptions{rule, KBasis::Scanpath});
}

/// Per-column min-max scaling to [0,1]; constant columns map to 0.5.
Matrix min_max_normalize(const Matrix& m);

/// Returns t with its normalized copy filled. Throws for fewer than 2 rows.
MetricTable normalize(MetricTable t);

/// Affine weights over the 16 metrics; selected weights sum to 1.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(const std::array<double, kMetricCount>& w) : weights_(w) {}

    /// Parses "Metric=weight,..."; unlisted metrics get 0. Throws on bad syntax,
    /// unknown names, or an invalid sum.
    static WeightVector parse(std::string_view spec);
    static WeightVector single(MetricId m);

    double operator[](MetricId m) const noexcept { return weights_[index_of(m)]; }
    const std::array<double, kMetricCount>& values() const noexcept { return weights_; }
    std::vector<MetricId> selected() const;

    /// Throws std::invalid_argument unless each weight is in [0,1] and the sum is 1 ± 1e-9.
    void validate() const;
    bool valid() const noexcept;

    /// Canonical form: canonical metric order, weights rounded to 1e-6, zeros omitted.
    std::string canonical_key() const;

private:
    std::array<double, kMetricCount> weights_{};
};

/// W-Avg per entity: sum_k w_k * normalized_k.
std::vector<double> merge_metrics(const MetricTable& t, const WeightVector& w);

/// Appends a derived column (e.g. "W-Avg").
MetricTable with_derived(MetricTable t, std::string name, std::vector<double> values);

/// Closed interval on one axis: a metric name or a derived column name.
struct AxisInterval {
    std::string axis;
    double lo = 0.0;
    double hi = 0.0;
};

/// Row indices whose value lies in every interval. Metric axes read the
/// normalized or raw values; derived columns are read as stored. Throws
/// std::invalid_argument for an unknown axis or lo > hi.
std::vector<std::size_t> filter_entities(const MetricTable& t, std::span<const AxisInterval> intervals,
                                         bool normalized = false);

struct MetricCsvOptions {
    bool normalized = false;      // write normalized instead of raw values
    bool include_support = false; // add <Metric>_n columns with contributing scanpath counts
};

std::string metric_table_csv(const MetricTable& t, const MetricCsvOptions& options = {});
std::string metric_table_json(const MetricTable& t);

}  // namespace gazecluster
