#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <regex>
#include <set>

#include "gazecluster/hilbert.hpp"
#include "gazecluster/layout.hpp"
#include "gazecluster/pipeline.hpp"
#include "generators.hpp"

using namespace gazecluster;
using doctest::Approx;

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::size_t> identity(std::size_t p) {
    std::vector<std::size_t> v(p);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

struct Fixture {
    MetricTable table;
    SimilarityTensor tensor;
    SubgridAssignment sub;
    ColorSpec colors;
};

Fixture fixture(std::size_t p, std::uint64_t seed) {
    testgen::Rng rng(seed);
    Fixture f;
    f.table = testgen::random_table(rng, p);
    f.tensor = pairwise_similarity(f.table);
    const std::vector<MetricId> slots(kAllMetrics.begin(), kAllMetrics.end());
    f.sub = assign_subgrid(slots, 2);
    f.colors = bind_hues(assign_colors(slots.size()), slots);
    return f;
}

}  // namespace

TEST_CASE("hilbert curve reference points") {
    CHECK(hilbert_d2xy(2, 0) == GridCell{0, 0});
    CHECK(hilbert_d2xy(2, 15) == GridCell{3, 0});
    CHECK(hilbert_d2xy(1, 0) == GridCell{0, 0});
    CHECK(hilbert_d2xy(1, 1) == GridCell{0, 1});
    CHECK(hilbert_d2xy(1, 2) == GridCell{1, 1});
    CHECK(hilbert_d2xy(1, 3) == GridCell{1, 0});
    CHECK_THROWS_AS(hilbert_d2xy(2, 16), std::out_of_range);
}

TEST_CASE("hilbert curve is a bijective unit-step walk") {
    for (unsigned order = 1; order <= 4; ++order) {
        const auto side = hilbert_side(order);
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        GridCell prev = hilbert_d2xy(order, 0);
        for (std::uint64_t d = 0; d < side * side; ++d) {
            const auto c = hilbert_d2xy(order, d);
            CHECK(c.col < side);
            CHECK(c.row < side);
            CHECK(hilbert_xy2d(order, c) == d);
            seen.insert({c.col, c.row});
            if (d > 0) {
                const int step = std::abs(int(c.col) - int(prev.col)) + std::abs(int(c.row) - int(prev.row));
                CHECK(step == 1);
            }
            prev = c;
        }
        CHECK(seen.size() == side * side);
    }
}

TEST_CASE("hilbert order for a metric count") {
    CHECK(hilbert_order_for(1) == 1);
    CHECK(hilbert_order_for(4) == 1);
    CHECK(hilbert_order_for(5) == 2);
    CHECK(hilbert_order_for(16) == 2);
    CHECK(hilbert_order_for(17) == 3);
}

TEST_CASE("subgrid assignment") {
    const std::vector<MetricId> all(kAllMetrics.begin(), kAllMetrics.end());
    const auto full = assign_subgrid(all, 2);
    CHECK(full.side == 4);
    CHECK(full.empty_count() == 0);
    CHECK(*full.at({0, 0}) == kAllMetrics[0]);
    CHECK(*full.at({3, 0}) == kAllMetrics[15]);

    const std::vector<MetricId> ten(kAllMetrics.begin(), kAllMetrics.begin() + 10);
    const auto partial = assign_subgrid(ten, hilbert_order_for(ten.size()));
    CHECK(partial.side == 4);
    CHECK(partial.empty_count() == 6);
    for (std::size_t k = 0; k < 10; ++k) CHECK(*partial.at(hilbert_d2xy(2, k)) == ten[k]);
    CHECK_FALSE(partial.at(hilbert_d2xy(2, 10)));

    CHECK_THROWS_AS(assign_subgrid(all, 1), std::invalid_argument);
    const std::vector<MetricId> repeated{MetricId::AvgFix, MetricId::AvgFix};
    CHECK_THROWS_AS(assign_subgrid(repeated, 1), std::invalid_argument);
}

TEST_CASE("hue assignment and lightness encoding") {
    const auto spec = assign_colors(16);
    REQUIRE(spec.hues.size() == 16);
    for (std::size_t k = 0; k < 16; ++k) CHECK(spec.hues[k] == 20.0 * k);
    CHECK(encode_lightness(spec, 0.0) == 90);
    CHECK(encode_lightness(spec, 1.0) == 30);
    CHECK(encode_lightness(spec, 0.5) == 60);
    auto inverted = spec;
    inverted.invert = true;
    CHECK(encode_lightness(inverted, 0.0) == 30);
    CHECK(encode_lightness(inverted, 1.0) == 90);

    const std::vector<MetricId> order{MetricId::ScanLen, MetricId::AvgFix};
    const auto bound = bind_hues(assign_colors(2), order);
    CHECK(*bound.hue_of(MetricId::ScanLen) == 0);
    CHECK(*bound.hue_of(MetricId::AvgFix) == 20);
    CHECK_FALSE(bound.hue_of(MetricId::KCoef));
    CHECK_THROWS_AS(encode_cell_color(bound, MetricId::KCoef, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(encode_cell_color(bound, MetricId::AvgFix, 1.5), std::invalid_argument);
    CHECK(encode_cell_color(bound, MetricId::AvgFix, 0.0) == lab_to_srgb8(lch_to_lab(90, 13, 20)));
}

TEST_CASE("lab to srgb reference colors") {
    struct Ref {
        Lab lab;
        Rgb8 rgb;
    };
    const Ref refs[] = {
        {{100, 0, 0}, {255, 255, 255}},
        {{0, 0, 0}, {0, 0, 0}},
        {{50, 0, 0}, {119, 119, 119}},
        {{53.2408, 80.0925, 67.2032}, {255, 0, 0}},
        {{87.7347, -86.1827, 83.1793}, {0, 255, 0}},
        {{32.2970, 79.1875, -107.8602}, {0, 0, 255}},
        {{97.1393, -21.5537, 94.4780}, {255, 255, 0}},
        {{91.1132, -48.0875, -14.1312}, {0, 255, 255}},
        {{60.3242, 98.2343, -60.8249}, {255, 0, 255}},
    };
    for (const auto& r : refs) {
        INFO("L " << r.lab.l << " a " << r.lab.a << " b " << r.lab.b);
        CHECK(lab_to_srgb8(r.lab) == r.rgb);
    }
    CHECK(lab_to_srgb8({100, 0, 0}).hex() == "#ffffff");
    const auto white = lab_to_linear_srgb({100, 0, 0});
    CHECK(white.r == Approx(1.0).epsilon(1e-4));
    CHECK(white.g == Approx(1.0).epsilon(1e-4));
    CHECK(white.b == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("encoded colors stay inside the sRGB gamut") {
    const auto spec = assign_colors(16);
    for (double hue : spec.hues)
        for (double l = spec.l_min; l <= spec.l_max + 1e-9; l += 0.5)
            CHECK(in_srgb_gamut(lch_to_lab(l, spec.chroma, hue)));
    CHECK_FALSE(in_srgb_gamut(lch_to_lab(60, 50, 200)));
}

TEST_CASE("matrix layout structure") {
    const auto f = fixture(8, 1);
    const auto layout = build_matrix_layout(f.tensor, identity(8), f.sub, f.colors);
    CHECK(layout.entity_count() == 8);
    CHECK(layout.cells.size() == 8 * 8 * 16);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::uint32_t k = 0; k < 16; ++k) {
            const auto cell = hilbert_d2xy(2, k);
            const auto& diag = layout.at(r, r, cell);
            CHECK(diag.dhat == 0);
            CHECK(diag.color == lab_to_srgb8(lch_to_lab(90, 13, 20.0 * k)));
            for (std::size_t c = 0; c < 8; ++c) {
                const auto& sc = layout.at(r, c, cell);
                CHECK(sc.metric == kAllMetrics[k]);
                CHECK(sc.dhat >= 0);
                CHECK(sc.dhat <= 1);
                CHECK(sc.color == layout.at(c, r, cell).color);
            }
        }
    // each metric reaches d̂ = 1 somewhere
    for (std::uint32_t k = 0; k < 16; ++k) {
        double best = 0;
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c) best = std::max(best, layout.at(r, c, hilbert_d2xy(2, k)).dhat);
        CHECK(best == 1.0);
    }
}

TEST_CASE("reordering entities permutes matrix cells") {
    const auto f = fixture(9, 2);
    const auto base = build_matrix_layout(f.tensor, identity(9), f.sub, f.colors);
    testgen::Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        auto perm = identity(9);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const auto moved = build_matrix_layout(f.tensor, perm, f.sub, f.colors);
        CHECK(moved.entity_order[0] == f.table.entities[perm[0]]);
        for (std::size_t r = 0; r < 9; ++r)
            for (std::size_t c = 0; c < 9; ++c)
                for (std::uint32_t k = 0; k < 16; ++k) {
                    const auto cell = hilbert_d2xy(2, k);
                    CHECK(moved.at(r, c, cell).color == base.at(perm[r], perm[c], cell).color);
                }
    }
}

TEST_CASE("matrix layout rejects bad inputs") {
    const auto f = fixture(4, 3);
    const std::vector<std::size_t> short_order{0, 1, 2};
    const std::vector<std::size_t> repeated{0, 1, 1, 3};
    CHECK_THROWS_AS(build_matrix_layout(f.tensor, short_order, f.sub, f.colors), std::invalid_argument);
    CHECK_THROWS_AS(build_matrix_layout(f.tensor, repeated, f.sub, f.colors), std::invalid_argument);
}

TEST_CASE("svg output") {
    testgen::Rng rng(10);
    const auto table = testgen::random_table(rng, 2);
    const auto tensor = pairwise_similarity(table);
    const std::vector<MetricId> four{MetricId::AvgFix, MetricId::AvgSac, MetricId::KCoef, MetricId::ScanLen};
    const auto layout = build_matrix_layout(tensor, identity(2), assign_subgrid(four, 1),
                                            bind_hues(assign_colors(4), four), {1});
    const auto svg = render_svg(layout);
    CHECK(count_of(svg, "<rect ") == 16);
    CHECK(count_of(svg, "class=\"boundary\"") == 1);
    CHECK(count_of(svg, "<text ") == 4);
    CHECK(svg == render_svg(layout));
    CHECK(svg.starts_with("<?xml"));
    CHECK(count_of(render_svg(layout, {.labels = false}), "<text ") == 0);
    CHECK_THROWS_AS(render_svg(layout, {.pixel_size = 1}), std::invalid_argument);

    const std::vector<MetricId> ten(kAllMetrics.begin(), kAllMetrics.begin() + 10);
    const auto partial = build_matrix_layout(tensor, identity(2), assign_subgrid(ten, 2),
                                             bind_hues(assign_colors(10), ten));
    CHECK(count_of(render_svg(partial), "<rect ") == 2 * 2 * 10);
}

TEST_CASE("forty-entity matrix renders quickly") {
    testgen::Rng rng(40);
    const auto table = testgen::random_table(rng, 40);
    const auto start = std::chrono::steady_clock::now();
    const auto order = identity(40);
    const auto layout = build_dssm(table, order, {10, 20});
    const auto svg = render_svg(layout);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 1.0);
    CHECK(count_of(svg, "<rect ") == 40 * 40 * 16);
    CHECK(count_of(svg, "class=\"boundary\"") == 2);
}

TEST_CASE("layout json") {
    const auto f = fixture(3, 4);
    const auto json = layout_json(build_matrix_layout(f.tensor, identity(3), f.sub, f.colors, {2}));
    for (const char* key : {"\"entity_order\"", "\"hilbert_order\":2", "\"side\":4", "\"slot_metrics\"",
                            "\"hues\"", "\"chroma\":13", "\"lightness_range\":[30.0,90.0]",
                            "\"invert_lightness\":false", "\"dhat\"", "\"colors\"", "\"group_boundaries\":[2]"})
        CHECK_MESSAGE(json.find(key) != std::string::npos, key);
}

TEST_CASE("metric slot order") {
    testgen::Rng rng(12);
    const auto t = testgen::random_table(rng, 10);
    auto order = metric_slot_order(t, CorrelationDistance::Signed);
    CHECK(order.size() == 16);
    std::sort(order.begin(), order.end());
    CHECK(std::equal(order.begin(), order.end(), kAllMetrics.begin()));
    const auto two = metric_slot_order(testgen::random_table(rng, 2), CorrelationDistance::Signed);
    CHECK(std::equal(two.begin(), two.end(), kAllMetrics.begin()));
}
