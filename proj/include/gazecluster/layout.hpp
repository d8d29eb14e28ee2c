#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazecluster/color.hpp"
#include "gazecluster/hilbert.hpp"
#include "gazecluster/metrics.hpp"
#include "gazecluster/similarity.hpp"

namespace gazecluster {

/// Metric placement inside one matrix cell, walked along a Hilbert curve.
struct SubgridAssignment {
    unsigned order = 1;
    std::size_t side = 2;
    std::vector<MetricId> slot_metrics;              // slot k sits at hilbert_d2xy(order, k)
    std::vector<std::optional<MetricId>> cells;      // row-major side × side

    const std::optional<MetricId>& at(GridCell c) const { return cells[c.row * side + c.col]; }
    std::size_t empty_count() const noexcept { return cells.size() - slot_metrics.size(); }
};

/// Throws std::invalid_argument if more metrics than 4^order, or a metric repeats.
SubgridAssignment assign_subgrid(std::span<const MetricId> metric_leaf_order, unsigned order);

struct SubCell {
    std::optional<MetricId> metric;  // empty padding cell when unset
    double dhat = 0.0;
    Rgb8 color;
};

/// Seriated DSSM: p × p entity cells, each a side × side grid of sub-cells.
struct MatrixLayout {
    std::vector<std::string> entity_order;   // identifiers, display order
    std::vector<std::size_t> permutation;    // display position -> tensor entity index
    SubgridAssignment subgrid;
    ColorSpec colors;
    std::vector<SubCell> cells;              // [(row * p + col) * side^2 + sub_row * side + sub_col]
    std::vector<std::size_t> group_boundaries;

    std::size_t entity_count() const noexcept { return entity_order.size(); }
    std::size_t side() const noexcept { return subgrid.side; }
    const SubCell& at(std::size_t row, std::size_t col, GridCell sub) const {
        const auto s = subgrid.side;
        return cells[(row * entity_count() + col) * s * s + sub.row * s + sub.col];
    }
};

/// Per-metric d̂ is the distance over that metric's largest pairwise distance.
/// Throws std::invalid_argument on dimension mismatch or a non-permutation order.
MatrixLayout build_matrix_layout(const SimilarityTensor& tensor,
                                 std::span<const std::size_t> entity_order,
                                 const SubgridAssignment& sub, const ColorSpec& spec,
                                 std::vector<std::size_t> group_boundaries = {});

struct SvgOptions {
    std::size_t pixel_size = 16;  // per entity cell, >= subgrid side
    std::size_t label_margin = 64;
    bool labels = true;
};

/// Deterministic SVG 1.1; one rect per non-empty sub-cell, one white path per
/// group boundary. Throws std::invalid_argument if pixel_size < side.
std::string render_svg(const MatrixLayout& layout, const SvgOptions& options = {});

std::string layout_json(const MatrixLayout& layout);

}  // namespace gazecluster
