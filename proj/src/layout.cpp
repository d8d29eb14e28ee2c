#include "gazecluster/layout.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "gazecluster/kernels.hpp"

namespace gazecluster {

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

SubgridAssignment assign_subgrid(std::span<const MetricId> metric_leaf_order, unsigned order) {
    const auto side = hilbert_side(order);
    if (metric_leaf_order.size() > side * side)
        throw std::invalid_argument(fmt::format("{} metrics do not fit a Hilbert grid of order {}",
                                                metric_leaf_order.size(), order));
    SubgridAssignment sub;
    sub.order = order;
    sub.side = side;
    sub.cells.assign(side * side, std::nullopt);
    for (std::size_t k = 0; k < metric_leaf_order.size(); ++k) {
        const auto m = metric_leaf_order[k];
        if (std::find(sub.slot_metrics.begin(), sub.slot_metrics.end(), m) != sub.slot_metrics.end())
            throw std::invalid_argument(fmt::format("metric {} assigned twice", metric_name(m)));
        sub.slot_metrics.push_back(m);
        const auto cell = hilbert_d2xy(order, k);
        sub.cells[cell.row * side + cell.col] = m;
    }
    return sub;
}

MatrixLayout build_matrix_layout(const SimilarityTensor& tensor,
                                 std::span<const std::size_t> entity_order,
                                 const SubgridAssignment& sub, const ColorSpec& spec,
                                 std::vector<std::size_t> group_boundaries) {
    const auto p = tensor.entity_count;
    if (entity_order.size() != p)
        throw std::invalid_argument("build_matrix_layout: entity order length mismatch");
    if (tensor.values.size() != p * p * tensor.metric_count())
        throw std::invalid_argument("build_matrix_layout: tensor size mismatch");
    std::vector<bool> seen(p, false);
    for (auto e : entity_order) {
        if (e >= p || seen[e]) throw std::invalid_argument("build_matrix_layout: order is not a permutation");
        seen[e] = true;
    }
    if (sub.cells.size() != sub.side * sub.side)
        throw std::invalid_argument("build_matrix_layout: malformed subgrid");
    for (auto b : group_boundaries)
        if (b == 0 || b >= p) throw std::invalid_argument("build_matrix_layout: boundary out of range");

    std::vector<std::size_t> slot_of_cell(sub.cells.size(), kernels::npos);
    std::vector<MetricId> metric_of_cell(sub.cells.size(), MetricId::AvgFix);
    for (std::size_t c = 0; c < sub.cells.size(); ++c) {
        if (!sub.cells[c]) continue;
        const auto m = *sub.cells[c];
        if (!spec.hue_of(m))
            throw std::invalid_argument(fmt::format("no hue bound for {}", metric_name(m)));
        slot_of_cell[c] = tensor.metric_position(m);
        metric_of_cell[c] = m;
    }

    std::vector<double> metric_max(tensor.metric_count(), 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t l = 0; l < p; ++l) {
            auto pair = tensor.pair(i, l);
            for (std::size_t k = 0; k < pair.size(); ++k) metric_max[k] = std::max(metric_max[k], pair[k]);
        }

    MatrixLayout layout;
    layout.permutation.assign(entity_order.begin(), entity_order.end());
    for (auto e : entity_order) layout.entity_order.push_back(tensor.entity_order[e]);
    layout.subgrid = sub;
    layout.colors = spec;
    std::sort(group_boundaries.begin(), group_boundaries.end());
    group_boundaries.erase(std::unique(group_boundaries.begin(), group_boundaries.end()),
                           group_boundaries.end());
    layout.group_boundaries = std::move(group_boundaries);
    layout.cells.resize(p * p * sub.cells.size());

    kernels::ShadeInput in;
    in.tensor = &tensor;
    in.permutation = layout.permutation;
    in.slot_of_cell = slot_of_cell;
    in.metric_of_cell = metric_of_cell;
    in.metric_max = metric_max;
    in.spec = &spec;
    kernels::omp::shade_cells(in, layout.cells);
    return layout;
}

std::string render_svg(const MatrixLayout& layout, const SvgOptions& options) {
    const auto side = layout.side();
    if (options.pixel_size < side)
        throw std::invalid_argument(
            fmt::format("pixel size {} too small for {}x{} sub-cells", options.pixel_size, side, side));
    const auto p = layout.entity_count();
    const auto cell = options.pixel_size;
    const auto sub = cell / side;
    const auto margin = options.labels ? options.label_margin : 0;
    const auto extent = p * cell;
    const auto width = margin + extent;

    std::string out;
    out.reserve(p * p * side * side * 72 + 1024);
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" "
        "viewBox=\"0 0 {0} {0}\" shape-rendering=\"crispEdges\">\n",
        width);

    if (options.labels) {
        out += "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#000000\">\n";
        for (std::size_t j = 0; j < p; ++j) {
            const auto name = xml_escape(layout.entity_order[j]);
            const auto centre = margin + j * cell + cell / 2;
            out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
                               margin - 4, centre, name);
            out += fmt::format("<text x=\"{0}\" y=\"{1}\" text-anchor=\"start\" dominant-baseline=\"middle\" "
                               "transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
                               centre, margin - 4, name);
        }
        out += "</g>\n";
    }

    out += "<g>\n";
    for (std::size_t row = 0; row < p; ++row)
        for (std::size_t col = 0; col < p; ++col)
            for (std::uint32_t sr = 0; sr < side; ++sr)
                for (std::uint32_t sc = 0; sc < side; ++sc) {
                    const auto& sc_cell = layout.at(row, col, {sc, sr});
                    if (!sc_cell.metric) continue;
                    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                                       margin + col * cell + sc * sub, margin + row * cell + sr * sub,
                                       sub, sub, sc_cell.color.hex());
                }
    out += "</g>\n";

    if (!layout.group_boundaries.empty()) {
        out += "<g stroke=\"#ffffff\" stroke-width=\"2\" fill=\"none\">\n";
        for (auto b : layout.group_boundaries) {
            const auto pos = margin + b * cell;
            out += fmt::format("<path class=\"boundary\" d=\"M{0} {1}V{2}M{1} {0}H{2}\"/>\n", pos,
                               margin, margin + extent);
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string layout_json(const MatrixLayout& layout) {
    using nlohmann::json;
    const auto p = layout.entity_count();
    const auto per_cell = layout.subgrid.cells.size();

    json subgrid = json::array();
    for (const auto& c : layout.subgrid.cells)
        subgrid.push_back(c ? json(std::string(metric_name(*c))) : json(nullptr));
    json slots = json::array();
    for (auto m : layout.subgrid.slot_metrics) slots.push_back(std::string(metric_name(m)));
    json hues = json::object();
    for (auto m : layout.subgrid.slot_metrics)
        if (auto h = layout.colors.hue_of(m)) hues[std::string(metric_name(m))] = *h;

    json dhat = json::array();
    json colors = json::array();
    for (std::size_t row = 0; row < p; ++row) {
        json drow = json::array();
        json crow = json::array();
        for (std::size_t col = 0; col < p; ++col) {
            json dcell = json::array();
            json ccell = json::array();
            for (std::size_t s = 0; s < per_cell; ++s) {
                const auto& sc = layout.cells[(row * p + col) * per_cell + s];
                dcell.push_back(sc.metric ? json(sc.dhat) : json(nullptr));
                ccell.push_back(sc.metric ? json(sc.color.hex()) : json(nullptr));
            }
            drow.push_back(std::move(dcell));
            crow.push_back(std::move(ccell));
        }
        dhat.push_back(std::move(drow));
        colors.push_back(std::move(crow));
    }

    json j;
    j["entity_order"] = layout.entity_order;
    j["hilbert_order"] = layout.subgrid.order;
    j["side"] = layout.subgrid.side;
    j["subgrid"] = std::move(subgrid);
    j["slot_metrics"] = std::move(slots);
    j["hues"] = std::move(hues);
    j["chroma"] = layout.colors.chroma;
    j["lightness_range"] = {layout.colors.l_min, layout.colors.l_max};
    j["invert_lightness"] = layout.colors.invert;
    j["dhat"] = std::move(dhat);
    j["colors"] = std::move(colors);
    j["group_boundaries"] = layout.group_boundaries;
    return j.dump();
}

}  // namespace gazecluster
