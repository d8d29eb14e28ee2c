#include "gazecluster/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gazecluster::kernels {

namespace {

void diff_row(const Matrix& values, std::size_t i, double* out) {
    const auto p = values.rows();
    const auto n = values.cols();
    for (std::size_t l = 0; l < p; ++l) {
        double* dst = out + (i * p + l) * n;
        for (std::size_t k = 0; k < n; ++k) dst[k] = std::abs(values(i, k) - values(l, k));
    }
}

double combine_pair(const double* pair, std::span<const double> w, CombineForm form) {
    double acc = 0.0;
    if (form == CombineForm::WeightedSum) {
        for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * pair[k];
        return acc;
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double t = w[k] * pair[k];
        acc += t * t;
    }
    return std::sqrt(acc);
}

void combine_row(std::span<const double> tensor, std::size_t p, std::span<const double> w,
                 CombineForm form, std::size_t i, Matrix& out) {
    const auto n = w.size();
    for (std::size_t l = 0; l < p; ++l)
        out(i, l) = combine_pair(tensor.data() + (i * p + l) * n, w, form);
}

void shade_row(const ShadeInput& in, std::size_t row, std::span<SubCell> out) {
    const auto& t = *in.tensor;
    const auto p = in.permutation.size();
    const auto cells = in.slot_of_cell.size();
    const auto er = in.permutation[row];
    for (std::size_t col = 0; col < p; ++col) {
        const auto ec = in.permutation[col];
        SubCell* dst = out.data() + (row * p + col) * cells;
        for (std::size_t s = 0; s < cells; ++s) {
            const auto k = in.slot_of_cell[s];
            if (k == npos) {
                dst[s] = SubCell{};
                continue;
            }
            const double max = in.metric_max[k];
            const double dhat = max > 0.0 ? std::min(1.0, t.at(er, ec, k) / max) : 0.0;
            const auto metric = in.metric_of_cell[s];
            dst[s] = SubCell{metric, dhat, encode_cell_color(*in.spec, metric, dhat)};
        }
    }
}

}  // namespace

namespace serial {

std::vector<MetricVector> scanpath_metrics_batch(std::span<const Scanpath> scanpaths,
                                                 const KReference* k_reference) {
    std::vector<MetricVector> out(scanpaths.size());
    for (std::size_t i = 0; i < scanpaths.size(); ++i) out[i] = scanpath_metrics(scanpaths[i], k_reference);
    return out;
}

std::vector<double> pairwise_abs_diff(const Matrix& values) {
    const auto p = values.rows();
    std::vector<double> out(p * p * values.cols());
    for (std::size_t i = 0; i < p; ++i) diff_row(values, i, out.data());
    return out;
}

Matrix weighted_combine(std::span<const double> tensor, std::size_t p,
                        std::span<const double> weights, CombineForm form) {
    Matrix out(p, p);
    for (std::size_t i = 0; i < p; ++i) combine_row(tensor, p, weights, form, i, out);
    return out;
}

void shade_cells(const ShadeInput& in, std::span<SubCell> out) {
    for (std::size_t row = 0; row < in.permutation.size(); ++row) shade_row(in, row, out);
}

}  // namespace serial

namespace omp {

std::vector<MetricVector> scanpath_metrics_batch(std::span<const Scanpath> scanpaths,
                                                 const KReference* k_reference) {
    std::vector<MetricVector> out(scanpaths.size());
    const auto n = static_cast<std::ptrdiff_t>(scanpaths.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = scanpath_metrics(scanpaths[i], k_reference);
    return out;
}

std::vector<double> pairwise_abs_diff(const Matrix& values) {
    const auto p = static_cast<std::ptrdiff_t>(values.rows());
    std::vector<double> out(values.rows() * values.rows() * values.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < p; ++i) diff_row(values, static_cast<std::size_t>(i), out.data());
    return out;
}

Matrix weighted_combine(std::span<const double> tensor, std::size_t p,
                        std::span<const double> weights, CombineForm form) {
    Matrix out(p, p);
    const auto rows = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        combine_row(tensor, p, weights, form, static_cast<std::size_t>(i), out);
    return out;
}

void shade_cells(const ShadeInput& in, std::span<SubCell> out) {
    const auto rows = static_cast<std::ptrdiff_t>(in.permutation.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t row = 0; row < rows; ++row)
        shade_row(in, static_cast<std::size_t>(row), out);
}

}  // namespace omp

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace gazecluster::kernels
