#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gazecluster/ingest.hpp"

namespace gazecluster {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Behavioural profile of one participant group.
struct GroupSpec {
    std::string name;
    std::size_t count = 20;
    Range avg_fix{250.0, 300.0};  // ms, participant-level mean fixation duration
    Range avg_sac{80.0, 120.0};   // px, participant-level mean saccade amplitude
    Range fixations{20.0, 40.0};  // fixations per scanpath
};

struct SynthSpec {
    std::vector<GroupSpec> groups;
    std::size_t stimuli = 48;
    double width = 1920.0;
    double height = 1080.0;
};

/// Groups separated by ';', fields "name=A,n=20,fix=300:380,sac=40:80,fixations=20:40".
/// Throws std::invalid_argument on malformed input.
std::vector<GroupSpec> parse_group_spec(std::string_view spec);

/// Two 20-participant groups: long fixations with short saccades vs the reverse.
std::string default_group_spec();

struct SynthOutput {
    Dataset dataset;
    std::vector<std::size_t> group_of_participant;  // parallel to dataset.participants()
};

/// Seeded generator; identical (spec, seed) gives an identical dataset.
SynthOutput synthesize(const SynthSpec& spec, std::uint64_t seed);

}  // namespace gazecluster
