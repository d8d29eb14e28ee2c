// Serial reference kernels vs their OpenMP versions.
//   bench_kernels --benchmark_filter=Combine

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "gazecluster/hilbert.hpp"
#include "gazecluster/kernels.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/synth.hpp"

namespace gc = gazecluster;
namespace kn = gazecluster::kernels;

namespace {

gc::MetricTable table_of(std::size_t p) {
    std::mt19937_64 rng(p);
    std::uniform_real_distribution<double> u(-50, 50);
    gc::MetricTable t;
    t.raw = gc::Matrix(p, gc::kMetricCount);
    t.support = gc::Grid<int>(p, gc::kMetricCount, 1);
    for (std::size_t r = 0; r < p; ++r) {
        t.entities.push_back("E" + std::to_string(r));
        for (std::size_t k = 0; k < gc::kMetricCount; ++k) t.raw(r, k) = u(rng);
    }
    return gc::normalize(std::move(t));
}

const std::vector<gc::Scanpath>& scanpaths() {
    static const auto paths = [] {
        gc::SynthSpec spec;
        spec.groups = gc::parse_group_spec(gc::default_group_spec());
        return gc::synthesize(spec, 1).dataset.scanpaths();
    }();
    return paths;
}

template <auto Fn>
void metrics_batch(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(Fn(scanpaths(), nullptr));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scanpaths().size()));
}

template <auto Fn>
void abs_diff(benchmark::State& state) {
    const auto t = table_of(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Fn(*t.normalized));
}

template <auto Fn>
void combine(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto tensor = kn::serial::pairwise_abs_diff(*table_of(p).normalized);
    std::vector<double> w(gc::kMetricCount, 1.0 / gc::kMetricCount);
    for (auto _ : state) benchmark::DoNotOptimize(Fn(tensor, p, w, gc::CombineForm::WeightedSum));
}

template <auto Fn>
void shade(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto tensor = gc::pairwise_similarity(table_of(p));
    const std::vector<gc::MetricId> slots(gc::kAllMetrics.begin(), gc::kAllMetrics.end());
    const auto sub = gc::assign_subgrid(slots, 2);
    const auto spec = gc::bind_hues(gc::assign_colors(slots.size()), slots);

    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> slot_of_cell(sub.cells.size());
    std::vector<gc::MetricId> metric_of_cell(sub.cells.size());
    for (std::size_t c = 0; c < sub.cells.size(); ++c) {
        slot_of_cell[c] = tensor.metric_position(*sub.cells[c]);
        metric_of_cell[c] = *sub.cells[c];
    }
    std::vector<double> metric_max(gc::kMetricCount, 1.0);
    const kn::ShadeInput in{&tensor, perm, slot_of_cell, metric_of_cell, metric_max, &spec};
    std::vector<gc::SubCell> out(p * p * sub.cells.size());
    for (auto _ : state) {
        Fn(in, out);
        benchmark::ClobberMemory();
    }
}

}  // namespace

BENCHMARK(metrics_batch<kn::serial::scanpath_metrics_batch>)->Name("MetricsBatch/serial");
BENCHMARK(metrics_batch<kn::omp::scanpath_metrics_batch>)->Name("MetricsBatch/omp");
BENCHMARK(abs_diff<kn::serial::pairwise_abs_diff>)->Name("AbsDiff/serial")->Arg(40)->Arg(200);
BENCHMARK(abs_diff<kn::omp::pairwise_abs_diff>)->Name("AbsDiff/omp")->Arg(40)->Arg(200);
BENCHMARK(combine<kn::serial::weighted_combine>)->Name("Combine/serial")->Arg(40)->Arg(200);
BENCHMARK(combine<kn::omp::weighted_combine>)->Name("Combine/omp")->Arg(40)->Arg(200);
BENCHMARK(shade<kn::serial::shade_cells>)->Name("Shade/serial")->Arg(40)->Arg(100);
BENCHMARK(shade<kn::omp::shade_cells>)->Name("Shade/omp")->Arg(40)->Arg(100);

BENCHMARK_MAIN();
