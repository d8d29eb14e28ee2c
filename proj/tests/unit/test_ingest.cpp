#include <doctest.h>

#include <algorithm>
#include <set>

#include "gazecluster/ingest.hpp"
#include "gazecluster/synth.hpp"
#include "generators.hpp"

using namespace gazecluster;

namespace {

constexpr const char* kHeader = "participant_id,stimulus_id,x,y,onset_ms,duration_ms\n";

bool has_issue_at(const std::vector<Issue>& issues, std::size_t row) {
    return std::any_of(issues.begin(), issues.end(), [row](const Issue& i) { return i.row == row; });
}

}  // namespace

TEST_CASE("minimal well-formed file gives one scanpath") {
    auto r = parse_fixation_csv(std::string(kHeader) +
                                "P1,S1,0,0,0,100\nP1,S1,3,4,150,100\nP1,S1,3,12,300,100\n");
    REQUIRE(r.report.accepted());
    REQUIRE(r.dataset);
    CHECK(r.dataset->scanpaths().size() == 1);
    CHECK(r.dataset->scanpaths()[0].fixations.size() == 3);
    CHECK(r.report.participant_count == 1);
    CHECK(r.report.stimulus_count == 1);
    CHECK(r.report.fixation_count == 3);
}

TEST_CASE("zero duration is reported at its data row") {
    auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,100\nP1,S1,3,4,150,0\n");
    CHECK_FALSE(r.report.accepted());
    CHECK_FALSE(r.dataset);
    REQUIRE(r.report.errors.size() == 1);
    CHECK(r.report.errors[0].row == 2);
}

TEST_CASE("validation errors") {
    SUBCASE("empty file") {
        auto r = parse_fixation_csv("");
        REQUIRE(r.report.errors.size() == 1);
        CHECK(r.report.errors[0].message == "empty file");
    }
    SUBCASE("missing column") {
        auto r = parse_fixation_csv("participant_id,stimulus_id,x,y,onset_ms\nP1,S1,0,0,0\n");
        REQUIRE(r.report.errors.size() == 1);
        CHECK(r.report.errors[0].row == 0);
        CHECK(r.report.errors[0].message.find("duration_ms") != std::string::npos);
    }
    SUBCASE("non-numeric field") {
        auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,abc,0,0,100\n");
        REQUIRE(r.report.errors.size() == 1);
        CHECK(r.report.errors[0].row == 1);
    }
    SUBCASE("duplicate onset") {
        auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,100\nP1,S1,5,5,0,80\n");
        CHECK_FALSE(r.report.accepted());
        CHECK(has_issue_at(r.report.errors, 2));
    }
    SUBCASE("non-finite coordinate") {
        auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,inf,0,0,100\n");
        CHECK_FALSE(r.report.accepted());
    }
    SUBCASE("header only") {
        auto r = parse_fixation_csv(kHeader);
        CHECK_FALSE(r.report.accepted());
    }
}

TEST_CASE("columns are located by name and extra columns ignored") {
    auto r = parse_fixation_csv("duration_ms,onset_ms,y,x,stimulus_id,participant_id,pupil\n"
                                "100,0,2,1,S1,P1,3.1\n");
    REQUIRE(r.report.accepted());
    const auto& f = r.dataset->scanpaths()[0].fixations[0];
    CHECK(f.x == 1);
    CHECK(f.y == 2);
    CHECK(f.duration == 100);
}

TEST_CASE("out-of-order fixations are re-sorted with a warning, rejected when strict") {
    const std::string csv = std::string(kHeader) + "P1,S1,0,0,300,100\nP1,S1,1,1,0,100\nP1,S1,2,2,150,100\n";
    auto lenient = parse_fixation_csv(csv);
    REQUIRE(lenient.report.accepted());
    CHECK(lenient.report.warnings.size() == 1);
    const auto& fx = lenient.dataset->scanpaths()[0].fixations;
    CHECK(fx[0].onset == 0);
    CHECK(fx[1].onset == 150);
    CHECK(fx[2].onset == 300);

    auto strict = parse_fixation_csv(csv, {.strict = true});
    CHECK_FALSE(strict.report.accepted());
}

TEST_CASE("overlapping fixations warn") {
    auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,200\nP1,S1,5,5,100,100\n");
    REQUIRE(r.report.accepted());
    CHECK(has_issue_at(r.report.warnings, 2));
    CHECK_FALSE(parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,200\nP1,S1,5,5,100,100\n",
                                   {.strict = true})
                    .report.accepted());
}

TEST_CASE("single-fixation scanpaths are retained and flagged") {
    auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,200\n");
    REQUIRE(r.report.accepted());
    CHECK(r.dataset->scanpaths().size() == 1);
    REQUIRE(r.report.warnings.size() == 1);
    CHECK(r.report.warnings[0].message.find("single-fixation") != std::string::npos);
}

TEST_CASE("40 x 48 synthetic file parses to 1920 scanpaths") {
    SynthSpec spec;
    spec.groups = parse_group_spec(default_group_spec());
    const auto csv = serialize_fixation_csv(synthesize(spec, 1).dataset);
    auto r = parse_fixation_csv(csv);
    REQUIRE(r.report.accepted());
    CHECK(r.dataset->participants().size() == 40);
    CHECK(r.dataset->stimuli().size() == 48);
    CHECK(r.dataset->scanpaths().size() == 1920);

    // Every data row lands in exactly one scanpath.
    const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
    CHECK(r.dataset->fixation_count() == rows);
}

TEST_CASE("pivot_entities") {
    auto r = parse_fixation_csv(std::string(kHeader) +
                                "P1,S1,0,0,0,100\nP1,S2,0,0,0,100\nP2,S1,0,0,0,100\nP2,S3,1,1,0,90\n");
    REQUIRE(r.dataset);
    const auto& d = *r.dataset;
    CHECK(pivot_entities(d, EntityAxis::Participant).entities().size() == 2);
    const auto by_stimulus = pivot_entities(d, EntityAxis::Stimulus);
    CHECK(by_stimulus.entities().size() == 3);
    CHECK(by_stimulus.entity_of(by_stimulus.scanpaths()[1]) == "S2");
    CHECK(pivot_entities(by_stimulus, EntityAxis::Participant) == d);
}

TEST_CASE("parsing is deterministic and serialize round-trips") {
    testgen::Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Scanpath> paths;
        const auto participants = 1 + rng.below(4);
        const auto stimuli = 1 + rng.below(4);
        for (std::size_t p = 0; p < participants; ++p)
            for (std::size_t s = 0; s < stimuli; ++s)
                paths.push_back(testgen::random_scanpath(rng, 1 + rng.below(12), true, "P" + std::to_string(p),
                                                         "S" + std::to_string(s)));
        const Dataset d(paths);
        const auto text = serialize_fixation_csv(d);
        auto first = parse_fixation_csv(text);
        auto second = parse_fixation_csv(text);
        REQUIRE(first.dataset);
        CHECK(*first.dataset == d);
        CHECK(*first.dataset == *second.dataset);
        CHECK(serialize_fixation_csv(*first.dataset) == text);
    }
}

TEST_CASE("quoted identifiers and CRLF line endings") {
    auto r = parse_fixation_csv("participant_id,stimulus_id,x,y,onset_ms,duration_ms\r\n"
                                "\"Smith, J\",S1,0,0,0,100\r\n");
    REQUIRE(r.report.accepted());
    CHECK(r.dataset->participants()[0] == "Smith, J");
    auto again = parse_fixation_csv(serialize_fixation_csv(*r.dataset));
    REQUIRE(again.dataset);
    CHECK(*again.dataset == *r.dataset);
}

TEST_CASE("trial sidecar sets trial durations") {
    auto r = parse_fixation_csv(std::string(kHeader) + "P1,S1,0,0,0,100\nP1,S1,3,4,150,100\n");
    REQUIRE(r.dataset);
    ValidationReport report;
    auto d = apply_trial_sidecar(*r.dataset,
                                 "participant_id,stimulus_id,trial_duration_ms\nP1,S1,5000\nP9,S1,10\n", report);
    CHECK(report.accepted());
    CHECK(report.warnings.size() == 1);
    CHECK(d.scanpaths()[0].trial_duration_ms == 5000.0);

    ValidationReport bad;
    apply_trial_sidecar(*r.dataset, "participant_id,stimulus_id,trial_duration_ms\nP1,S1,-3\n", bad);
    CHECK_FALSE(bad.accepted());
}

TEST_CASE("Dataset constructor enforces invariants") {
    CHECK_THROWS_AS(Dataset({Scanpath{"P", "S", {}, std::nullopt}}), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({Scanpath{"P", "S", {{0, 0, 10, 5}, {0, 0, 10, 5}}, std::nullopt}}),
                    std::invalid_argument);
    Scanpath ok{"P", "S", {{0, 0, 0, 5}}, std::nullopt};
    CHECK_THROWS_AS(Dataset({ok, ok}), std::invalid_argument);
}
