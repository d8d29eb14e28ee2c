#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version used by the
// library and a serial twin kept as the reference for tests and benchmarks.
// Every output element is written by exactly one iteration with a fixed
// inner summation order, so both versions agree bit for bit.

#include <cstddef>
#include <span>
#include <vector>

#include "gazecluster/color.hpp"
#include "gazecluster/grid.hpp"
#include "gazecluster/ingest.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/metrics.hpp"
#include "gazecluster/similarity.hpp"

namespace gazecluster::kernels {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct ShadeInput {
    const SimilarityTensor* tensor = nullptr;
    std::span<const std::size_t> permutation;   // display position -> tensor entity
    std::span<const std::size_t> slot_of_cell;  // sub-cell (row-major) -> tensor metric position, or npos
    std::span<const MetricId> metric_of_cell;   // sub-cell -> metric, where slot_of_cell != npos
    std::span<const double> metric_max;         // per tensor metric position
    const ColorSpec* spec = nullptr;
};

namespace serial {

std::vector<MetricVector> scanpath_metrics_batch(std::span<const Scanpath> scanpaths,
                                                 const KReference* k_reference = nullptr);

/// values: p × n. Result is p*p*n, pair-contiguous.
std::vector<double> pairwise_abs_diff(const Matrix& values);

Matrix weighted_combine(std::span<const double> tensor, std::size_t p,
                        std::span<const double> weights, CombineForm form);

/// out has p*p*side^2 entries.
void shade_cells(const ShadeInput& in, std::span<SubCell> out);

}  // namespace serial

namespace omp {

std::vector<MetricVector> scanpath_metrics_batch(std::span<const Scanpath> scanpaths,
                                                 const KReference* k_reference = nullptr);
std::vector<double> pairwise_abs_diff(const Matrix& values);
Matrix weighted_combine(std::span<const double> tensor, std::size_t p,
                        std::span<const double> weights, CombineForm form);
void shade_cells(const ShadeInput& in, std::span<SubCell> out);

}  // namespace omp

/// Threads the OpenMP kernels will use (1 when built without OpenMP).
int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace gazecluster::kernels
