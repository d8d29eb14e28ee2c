#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazecluster/similarity.hpp"
#include "generators.hpp"

using namespace gazecluster;
using doctest::Approx;

namespace {

MetricTable two_entity_table(double a, double b) {
    MetricTable t;
    t.entities = {"a", "b"};
    t.raw = Matrix(2, kMetricCount, 1.0);
    t.support = Grid<int>(2, kMetricCount, 1);
    t.raw(0, index_of(MetricId::AvgFix)) = a;
    t.raw(1, index_of(MetricId::AvgFix)) = b;
    return normalize(std::move(t));
}

MetricTable permuted(const MetricTable& t, const std::vector<std::size_t>& perm) {
    MetricTable out;
    out.raw = Matrix(t.size(), kMetricCount);
    out.support = Grid<int>(t.size(), kMetricCount, 1);
    for (std::size_t r = 0; r < perm.size(); ++r) {
        out.entities.push_back(t.entities[perm[r]]);
        for (std::size_t k = 0; k < kMetricCount; ++k) out.raw(r, k) = t.raw(perm[r], k);
    }
    return normalize(std::move(out));
}

}  // namespace

TEST_CASE("raw per-metric distance") {
    const auto tensor = pairwise_similarity(two_entity_table(3, 7), Scale::Raw);
    const auto k = tensor.metric_position(MetricId::AvgFix);
    CHECK(tensor.at(0, 1, k) == 4);
    CHECK(tensor.at(1, 0, k) == 4);
    CHECK(tensor.at(0, 0, k) == 0);
    CHECK(pairwise_similarity(two_entity_table(3, 7)).at(0, 1, k) == 1);
}

TEST_CASE("unnormalized table is rejected for normalized scale") {
    MetricTable t;
    t.entities = {"a", "b"};
    t.raw = Matrix(2, kMetricCount, 0.0);
    CHECK_THROWS_AS(pairwise_similarity(t), std::invalid_argument);
}

TEST_CASE("tensor matches brute force over a 10-entity table") {
    testgen::Rng rng(99);
    const auto t = testgen::random_table(rng, 10);
    const auto tensor = pairwise_similarity(t);
    const auto& n = *t.normalized;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t l = 0; l < 10; ++l) {
            if (i < l) ++pairs;
            for (std::size_t k = 0; k < kMetricCount; ++k)
                CHECK(tensor.at(i, l, k) == std::abs(n(i, k) - n(l, k)));
        }
    CHECK(pairs == 45);
    CHECK(tensor.values.size() == 10 * 10 * 16);
    CHECK(tensor.slice(MetricId::ScanLen)(2, 5) == tensor.at(2, 5, index_of(MetricId::ScanLen)));
}

TEST_CASE("per-metric distances satisfy the triangle inequality") {
    testgen::Rng rng(4);
    const auto tensor = pairwise_similarity(testgen::random_table(rng, 9));
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j)
            for (std::size_t l = 0; l < 9; ++l)
                for (std::size_t k = 0; k < kMetricCount; ++k)
                    CHECK(tensor.at(i, l, k) <= tensor.at(i, j, k) + tensor.at(j, l, k) + 1e-15);
}

TEST_CASE("combined distance") {
    testgen::Rng rng(8);
    const auto t = testgen::random_table(rng, 8);
    const auto tensor = pairwise_similarity(t);

    SUBCASE("single metric equals the tensor slice") {
        const auto d = combined_distance(tensor, WeightVector::single(MetricId::KCoef));
        CHECK(d.values == tensor.slice(MetricId::KCoef));
        CHECK(d.provenance == "KCoef=1.000000");
    }
    SUBCASE("hand weights") {
        const auto w = WeightVector::parse("AvgFix=0.2,StdX=0.5,KurtY=0.3");
        const auto sum = combined_distance(tensor, w);
        const auto euclid = combined_distance(tensor, w, CombineForm::WeightedEuclidean);
        const auto& n = *t.normalized;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t l = 0; l < 8; ++l) {
                const double a = std::abs(n(i, 0) - n(l, 0));
                const double b = std::abs(n(i, 10) - n(l, 10));
                const double c = std::abs(n(i, 15) - n(l, 15));
                CHECK(sum.values(i, l) == Approx(0.2 * a + 0.5 * b + 0.3 * c).epsilon(1e-14));
                CHECK(euclid.values(i, l) ==
                      Approx(std::sqrt(0.04 * a * a + 0.25 * b * b + 0.09 * c * c)).epsilon(1e-14));
                CHECK(sum.values(i, l) == sum.values(l, i));
            }
        CHECK(combined_distance(t, w).values == sum.values);
    }
    SUBCASE("identical entities are at distance zero") {
        MetricTable same;
        same.entities = {"a", "b", "c"};
        same.raw = Matrix(3, kMetricCount, 2.0);
        same.raw(2, 0) = 5;
        same.support = Grid<int>(3, kMetricCount, 1);
        const auto d = combined_distance(normalize(same), WeightVector::parse("AvgFix=0.5,FixNum=0.5"));
        CHECK(d.values(0, 1) == 0);
        CHECK(d.values(0, 2) == 0.5);
    }
    SUBCASE("invalid weights") {
        std::array<double, kMetricCount> bad{};
        bad[0] = 0.4;
        CHECK_THROWS_AS(combined_distance(tensor, WeightVector(bad)), std::invalid_argument);
    }
}

TEST_CASE("shifting weight toward a metric moves distance by the per-metric gap") {
    testgen::Rng rng(21);
    const auto tensor = pairwise_similarity(testgen::random_table(rng, 6));
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = kAllMetrics[rng.below(kMetricCount)];
        auto b = kAllMetrics[rng.below(kMetricCount)];
        if (a == b) continue;
        const double delta = rng.uniform(0.05, 0.5);
        std::array<double, kMetricCount> w0{}, w1{};
        w0[index_of(a)] = 1.0 - delta;
        w0[index_of(b)] = delta;
        w1[index_of(a)] = 0.5 - delta / 2;
        w1[index_of(b)] = 0.5 + delta / 2;
        const auto d0 = combined_distance(tensor, WeightVector(w0));
        const auto d1 = combined_distance(tensor, WeightVector(w1));
        const double moved = w1[index_of(b)] - w0[index_of(b)];
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t l = 0; l < 6; ++l) {
                const double gap = tensor.at(i, l, index_of(b)) - tensor.at(i, l, index_of(a));
                CHECK(d1.values(i, l) - d0.values(i, l) == Approx(moved * gap).epsilon(1e-12).scale(1));
            }
    }
}

TEST_CASE("relabeling entities conjugates the distance matrix") {
    testgen::Rng rng(13);
    const auto t = testgen::random_table(rng, 7);
    std::vector<std::size_t> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    const auto w = WeightVector::parse("AvgSac=0.6,CompTime=0.4");
    const auto d = combined_distance(t, w);
    const auto dp = combined_distance(permuted(t, perm), w);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t l = 0; l < 7; ++l) CHECK(dp.values(i, l) == d.values(perm[i], perm[l]));
    CHECK(dp.entities[0] == t.entities[perm[0]]);
}

TEST_CASE("metric correlations") {
    testgen::Rng rng(1);
    auto t = testgen::random_table(rng, 12);
    for (std::size_t r = 0; r < 12; ++r) {
        t.raw(r, index_of(MetricId::SacNum)) = t.raw(r, index_of(MetricId::FixNum)) - 1;
        t.raw(r, index_of(MetricId::KurtY)) = -t.raw(r, index_of(MetricId::KurtX));
        t.raw(r, index_of(MetricId::StdY)) = 3.0;
    }
    const auto c = metric_correlations(t);
    const auto at = [&](MetricId a, MetricId b) { return c.values(index_of(a), index_of(b)); };
    CHECK(at(MetricId::AvgFix, MetricId::AvgFix) == 1);
    CHECK(at(MetricId::FixNum, MetricId::SacNum) == Approx(1.0).epsilon(1e-12));
    CHECK(at(MetricId::KurtX, MetricId::KurtY) == Approx(-1.0).epsilon(1e-12));
    CHECK(at(MetricId::StdY, MetricId::AvgFix) == 0);
    CHECK(at(MetricId::StdY, MetricId::StdY) == 1);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("StdY") != std::string::npos);
    for (std::size_t i = 0; i < kMetricCount; ++i)
        for (std::size_t j = 0; j < kMetricCount; ++j) {
            CHECK(c.values(i, j) == c.values(j, i));
            CHECK(std::abs(c.values(i, j)) <= 1.0);
        }

    MetricTable small = testgen::random_table(rng, 2);
    CHECK_THROWS_AS(metric_correlations(small), std::invalid_argument);
}

TEST_CASE("correlation is invariant under positive affine maps of a column") {
    testgen::Rng rng(77);
    auto t = testgen::random_table(rng, 15);
    const auto base = metric_correlations(t);
    for (std::size_t r = 0; r < 15; ++r) t.raw(r, 3) = 4.5 * t.raw(r, 3) + 100;
    const auto mapped = metric_correlations(t);
    for (std::size_t j = 0; j < kMetricCount; ++j) CHECK(mapped.values(3, j) == Approx(base.values(3, j)).epsilon(1e-12));
}

TEST_CASE("exports") {
    const auto tensor = pairwise_similarity(two_entity_table(3, 7), Scale::Raw);
    const auto json = tensor_json(tensor);
    CHECK(json.find("\"entity_order\":[\"a\",\"b\"]") != std::string::npos);
    const auto d = combined_distance(tensor, WeightVector::single(MetricId::AvgFix));
    CHECK(distance_matrix_csv(d) == "entity,a,b\na,0,4\nb,4,0\n");
    CHECK(parse_combine_form("euclidean") == CombineForm::WeightedEuclidean);
    CHECK(parse_combine_form("sum") == CombineForm::WeightedSum);
    CHECK_FALSE(parse_combine_form("max"));
    CHECK(to_string(CombineForm::WeightedSum) == "sum");
}
