#include "gazecluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "gazecluster/kernels.hpp"
#include "gazecluster/text.hpp"

namespace gazecluster {

namespace {

constexpr std::array<std::string_view, kMetricCount> kNames = {
    "AvgFix", "AvgSac", "AvgSacDur", "KCoef", "FixNum", "FixRate", "SacNum", "SacRate",
    "ScanLen", "CompTime", "StdX", "StdY", "SkewX", "SkewY", "KurtX", "KurtY",
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end())
        return {xs.front(), 0.0};
    double m2 = 0.0;
    for (double x : xs) m2 += (x - mean) * (x - mean);
    return {mean, std::sqrt(m2 / n)};
}

double zscore(double v, const MeanStd& ms) { return ms.std > 0.0 ? (v - ms.mean) / ms.std : 0.0; }

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::string_view metric_name(MetricId m) noexcept { return kNames[index_of(m)]; }

std::optional<MetricId> parse_metric(std::string_view name) noexcept {
    for (std::size_t k = 0; k < kMetricCount; ++k)
        if (kNames[k] == name) return kAllMetrics[k];
    return std::nullopt;
}

MomentSummary moments(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("moments: empty input");
    const auto ms = mean_std(xs);
    if (ms.std == 0.0) return {ms.mean, 0.0, 0.0, 0.0};
    const auto n = static_cast<double>(xs.size());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - ms.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return {ms.mean, std::sqrt(m2), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

std::vector<double> saccade_amplitudes(const Scanpath& s) {
    std::vector<double> amps;
    if (s.fixations.size() < 2) return amps;
    amps.reserve(s.fixations.size() - 1);
    for (std::size_t i = 0; i + 1 < s.fixations.size(); ++i) {
        const auto& a = s.fixations[i];
        const auto& b = s.fixations[i + 1];
        amps.push_back(std::hypot(b.x - a.x, b.y - a.y));
    }
    return amps;
}

std::optional<double> k_coefficient(const Scanpath& s, const KReference& ref) {
    const auto n = s.fixations.size();
    if (n < 2) return std::nullopt;
    const auto amps = saccade_amplitudes(s);
    const MeanStd d_stats{ref.duration_mean, ref.duration_std};
    const MeanStd a_stats{ref.amplitude_mean, ref.amplitude_std};
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        sum += zscore(s.fixations[i].duration, d_stats) - zscore(amps[i], a_stats);
    return sum / static_cast<double>(n - 1);
}

std::optional<double> k_coefficient(const Scanpath& s) {
    if (s.fixations.size() < 2) return std::nullopt;
    std::vector<double> durations;
    durations.reserve(s.fixations.size());
    for (const auto& f : s.fixations) durations.push_back(f.duration);
    const auto amps = saccade_amplitudes(s);
    const auto d_stats = mean_std(durations);
    const auto a_stats = mean_std(amps);
    return k_coefficient(s, {d_stats.mean, d_stats.std, a_stats.mean, a_stats.std});
}

KReference dataset_k_reference(const Dataset& d) {
    std::vector<double> durations, amps;
    for (const auto& s : d.scanpaths()) {
        for (const auto& f : s.fixations) durations.push_back(f.duration);
        const auto a = saccade_amplitudes(s);
        amps.insert(amps.end(), a.begin(), a.end());
    }
    KReference ref;
    if (!durations.empty()) {
        const auto ds = mean_std(durations);
        ref.duration_mean = ds.mean;
        ref.duration_std = ds.std;
    }
    if (!amps.empty()) {
        const auto as = mean_std(amps);
        ref.amplitude_mean = as.mean;
        ref.amplitude_std = as.std;
    }
    return ref;
}

MetricVector scanpath_metrics(const Scanpath& s) { return scanpath_metrics(s, nullptr); }

MetricVector scanpath_metrics(const Scanpath& s, const KReference* k_reference) {
    MetricVector mv;
    auto set = [&mv](MetricId m, double v) {
        mv.values[index_of(m)] = v;
        mv.defined[index_of(m)] = true;
    };

    const auto& fx = s.fixations;
    const auto n = fx.size();
    if (n == 0) return mv;

    double duration_sum = 0.0;
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (const auto& f : fx) {
        duration_sum += f.duration;
        xs.push_back(f.x);
        ys.push_back(f.y);
    }
    const double comp_time =
        s.trial_duration_ms.value_or(fx.back().onset + fx.back().duration - fx.front().onset);
    const double seconds = comp_time / 1000.0;

    set(MetricId::FixNum, static_cast<double>(n));
    set(MetricId::AvgFix, duration_sum / static_cast<double>(n));
    set(MetricId::CompTime, comp_time);
    set(MetricId::FixRate, static_cast<double>(n) / seconds);

    const auto sac_num = static_cast<double>(n - 1);
    const auto amps = saccade_amplitudes(s);
    double scan_len = 0.0;
    for (double a : amps) scan_len += a;
    set(MetricId::SacNum, sac_num);
    set(MetricId::SacRate, sac_num / seconds);
    set(MetricId::ScanLen, scan_len);

    if (n >= 2) {
        double sac_dur = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            sac_dur += std::max(0.0, fx[i + 1].onset - (fx[i].onset + fx[i].duration));
        set(MetricId::AvgSac, scan_len / sac_num);
        set(MetricId::AvgSacDur, sac_dur / sac_num);
        set(MetricId::KCoef, k_reference ? *k_coefficient(s, *k_reference) : *k_coefficient(s));

        const auto mx = moments(xs);
        const auto my = moments(ys);
        set(MetricId::StdX, mx.std);
        set(MetricId::StdY, my.std);
        if (n >= 3) {
            set(MetricId::SkewX, mx.skewness);
            set(MetricId::SkewY, my.skewness);
            set(MetricId::KurtX, mx.kurtosis);
            set(MetricId::KurtY, my.kurtosis);
        }
    }
    return mv;
}

std::optional<KBasis> parse_k_basis(std::string_view s) noexcept {
    if (s == "scanpath") return KBasis::Scanpath;
    if (s == "dataset") return KBasis::Dataset;
    return std::nullopt;
}

std::optional<AggregateRule> parse_aggregate_rule(std::string_view s) noexcept {
    if (s == "mean") return AggregateRule::Mean;
    if (s == "median") return AggregateRule::Median;
    return std::nullopt;
}

AggregateResult aggregate(const Dataset& d, const AggregateOptions& options) {
    if (d.scanpaths().empty()) throw std::invalid_argument("aggregate: empty dataset");

    const auto& scanpaths = d.scanpaths();
    std::optional<KReference> reference;
    if (options.k_basis == KBasis::Dataset) reference = dataset_k_reference(d);
    const auto per_scanpath =
        kernels::omp::scanpath_metrics_batch(scanpaths, reference ? &*reference : nullptr);

    const auto& ids = d.entities();
    std::map<std::string_view, std::size_t> entity_index;
    for (std::size_t e = 0; e < ids.size(); ++e) entity_index.emplace(ids[e], e);
    std::vector<std::vector<std::size_t>> members(ids.size());
    for (std::size_t s = 0; s < scanpaths.size(); ++s)
        members[entity_index.at(d.entity_of(scanpaths[s]))].push_back(s);

    AggregateResult result;
    std::vector<std::array<double, kMetricCount>> rows;
    std::vector<std::array<int, kMetricCount>> supports;
    for (std::size_t e = 0; e < ids.size(); ++e) {
        std::array<double, kMetricCount> row{};
        std::array<int, kMetricCount> support{};
        std::vector<std::string_view> missing;
        for (std::size_t k = 0; k < kMetricCount; ++k) {
            std::vector<double> values;
            for (auto s : members[e])
                if (per_scanpath[s].defined[k]) values.push_back(per_scanpath[s].values[k]);
            support[k] = static_cast<int>(values.size());
            if (values.empty()) {
                missing.push_back(kNames[k]);
                continue;
            }
            if (options.rule == AggregateRule::Median) {
                row[k] = median_of(std::move(values));
            } else {
                double sum = 0.0;
                for (double v : values) sum += v;
                row[k] = sum / static_cast<double>(values.size());
            }
        }
        if (!missing.empty()) {
            result.dropped.push_back(ids[e]);
            result.warnings.push_back(fmt::format("entity {} dropped: no scanpath defines {}",
                                                  ids[e], fmt::join(missing, ", ")));
            continue;
        }
        result.table.entities.push_back(ids[e]);
        rows.push_back(row);
        supports.push_back(support);
    }

    auto& t = result.table;
    t.raw = Matrix(rows.size(), kMetricCount);
    t.support = Grid<int>(rows.size(), kMetricCount);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < kMetricCount; ++k) {
            t.raw(r, k) = rows[r][k];
            t.support(r, k) = supports[r][k];
        }
    return result;
}

Matrix min_max_normalize(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double lo = m(0, c), hi = m(0, c);
        for (std::size_t r = 1; r < m.rows(); ++r) {
            lo = std::min(lo, m(r, c));
            hi = std::max(hi, m(r, c));
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (span == 0.0) {
                out(r, c) = 0.5;
            } else {
                // Extremes are pinned so that re-normalizing is exact.
                const double v = m(r, c);
                out(r, c) = v == lo ? 0.0 : v == hi ? 1.0 : (v - lo) / span;
            }
        }
    }
    return out;
}

MetricTable normalize(MetricTable t) {
    if (t.size() < 2) throw std::invalid_argument("normalize: need at least 2 entities");
    t.normalized = min_max_normalize(t.raw);
    return t;
}

WeightVector WeightVector::parse(std::string_view spec) {
    std::array<double, kMetricCount> w{};
    std::array<bool, kMetricCount> seen{};
    for (const auto& item : text::split_csv_record(spec)) {
        auto entry = text::trim(item);
        if (entry.empty()) continue;
        auto eq = entry.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(fmt::format("weight entry '{}' is not Metric=weight", entry));
        auto name = text::trim(entry.substr(0, eq));
        auto metric = parse_metric(name);
        if (!metric) throw std::invalid_argument(fmt::format("unknown metric '{}'", name));
        auto value = text::parse_double(entry.substr(eq + 1));
        if (!value) throw std::invalid_argument(fmt::format("bad weight for {}", name));
        if (seen[index_of(*metric)])
            throw std::invalid_argument(fmt::format("metric {} listed twice", name));
        seen[index_of(*metric)] = true;
        w[index_of(*metric)] = *value;
    }
    WeightVector result(w);
    result.validate();
    return result;
}

WeightVector WeightVector::single(MetricId m) {
    std::array<double, kMetricCount> w{};
    w[index_of(m)] = 1.0;
    return WeightVector(w);
}

std::vector<MetricId> WeightVector::selected() const {
    std::vector<MetricId> out;
    for (auto m : kAllMetrics)
        if (weights_[index_of(m)] != 0.0) out.push_back(m);
    return out;
}

void WeightVector::validate() const {
    double sum = 0.0;
    for (auto m : kAllMetrics) {
        const double w = weights_[index_of(m)];
        if (!std::isfinite(w) || w < 0.0 || w > 1.0)
            throw std::invalid_argument(
                fmt::format("weight for {} must be in [0,1], got {}", metric_name(m), w));
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(fmt::format("weights must sum to 1, got {}", sum));
}

bool WeightVector::valid() const noexcept {
    try {
        validate();
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::string WeightVector::canonical_key() const {
    std::vector<std::string> parts;
    for (auto m : kAllMetrics) {
        const auto micro = std::llround(weights_[index_of(m)] * 1e6);
        if (micro == 0) continue;
        parts.push_back(fmt::format("{}={}.{:06d}", metric_name(m), micro / 1000000, micro % 1000000));
    }
    return fmt::format("{}", fmt::join(parts, ","));
}

std::vector<double> merge_metrics(const MetricTable& t, const WeightVector& w) {
    if (!t.normalized) throw std::invalid_argument("merge_metrics: table is not normalized");
    w.validate();
    const auto& norm = *t.normalized;
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t r = 0; r < t.size(); ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kMetricCount; ++k)
            if (w.values()[k] != 0.0) acc += w.values()[k] * norm(r, k);
        out[r] = acc;
    }
    return out;
}

MetricTable with_derived(MetricTable t, std::string name, std::vector<double> values) {
    if (values.size() != t.size())
        throw std::invalid_argument("derived column length does not match entity count");
    t.derived.push_back({std::move(name), std::move(values)});
    return t;
}

std::vector<std::size_t> filter_entities(const MetricTable& t, std::span<const AxisInterval> intervals,
                                         bool normalized) {
    if (normalized && !t.normalized) throw std::invalid_argument("filter_entities: table is not normalized");
    const Matrix& values = normalized ? *t.normalized : t.raw;

    std::vector<std::function<double(std::size_t)>> columns;
    for (const auto& iv : intervals) {
        if (!(iv.lo <= iv.hi)) throw std::invalid_argument(fmt::format("interval on {} has lo > hi", iv.axis));
        if (auto m = parse_metric(iv.axis)) {
            const auto k = index_of(*m);
            columns.push_back([&values, k](std::size_t r) { return values(r, k); });
            continue;
        }
        auto it = std::find_if(t.derived.begin(), t.derived.end(),
                               [&](const MetricTable::DerivedColumn& c) { return c.name == iv.axis; });
        if (it == t.derived.end()) throw std::invalid_argument(fmt::format("unknown axis '{}'", iv.axis));
        columns.push_back([it](std::size_t r) { return it->values[r]; });
    }

    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < t.size(); ++r) {
        bool keep = true;
        for (std::size_t c = 0; c < columns.size() && keep; ++c) {
            const double v = columns[c](r);
            keep = v >= intervals[c].lo && v <= intervals[c].hi;
        }
        if (keep) out.push_back(r);
    }
    return out;
}

std::string metric_table_csv(const MetricTable& t, const MetricCsvOptions& options) {
    if (options.normalized && !t.normalized)
        throw std::invalid_argument("metric_table_csv: table is not normalized");
    const Matrix& values = options.normalized ? *t.normalized : t.raw;

    std::string out = "entity";
    for (auto name : kNames) out += fmt::format(",{}", name);
    for (const auto& col : t.derived) out += "," + text::csv_field(col.name);
    if (options.include_support)
        for (auto name : kNames) out += fmt::format(",{}_n", name);
    out += '\n';

    for (std::size_t r = 0; r < t.size(); ++r) {
        out += text::csv_field(t.entities[r]);
        for (std::size_t k = 0; k < kMetricCount; ++k) out += "," + text::format_double(values(r, k));
        for (const auto& col : t.derived) out += "," + text::format_double(col.values[r]);
        if (options.include_support)
            for (std::size_t k = 0; k < kMetricCount; ++k) out += fmt::format(",{}", t.support(r, k));
        out += '\n';
    }
    return out;
}

std::string metric_table_json(const MetricTable& t) {
    using nlohmann::json;
    auto rows = [&](const Matrix& m) {
        json arr = json::array();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            auto row = m.row(r);
            arr.push_back(std::vector<double>(row.begin(), row.end()));
        }
        return arr;
    };
    json j;
    j["entities"] = t.entities;
    j["metrics"] = std::vector<std::string>(kNames.begin(), kNames.end());
    j["raw"] = rows(t.raw);
    j["normalized"] = t.normalized ? rows(*t.normalized) : json(nullptr);
    json support = json::array();
    for (std::size_t r = 0; r < t.support.rows(); ++r) {
        auto row = t.support.row(r);
        support.push_back(std::vector<int>(row.begin(), row.end()));
    }
    j["support"] = std::move(support);
    json derived = json::object();
    for (const auto& col : t.derived) derived[col.name] = col.values;
    j["derived"] = std::move(derived);
    return j.dump();
}

}  // namespace gazecluster
