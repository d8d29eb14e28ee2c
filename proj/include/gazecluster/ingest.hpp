#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gazecluster {

struct Fixation {
    double x = 0.0;         // px
    double y = 0.0;         // px
    double onset = 0.0;     // ms
    double duration = 0.0;  // ms, > 0

    bool operator==(const Fixation&) const = default;
};

/// Time-ordered fixations of one participant on one stimulus.
struct Scanpath {
    std::string participant_id;
    std::string stimulus_id;
    std::vector<Fixation> fixations;
    /// Trial duration from the metadata sidecar, when supplied.
    std::optional<double> trial_duration_ms;

    bool operator==(const Scanpath&) const = default;
};

/// Which identifier is the grouped variable; the other one is aggregated over.
enum class EntityAxis { Participant, Stimulus };

struct Issue {
    std::size_t row = 0;  // 1-based data row; 0 = header / whole file
    std::string message;

    bool operator==(const Issue&) const = default;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;
    std::size_t participant_count = 0;
    std::size_t stimulus_count = 0;
    std::size_t fixation_count = 0;

    bool accepted() const noexcept { return errors.empty(); }
};

/// Immutable collection of scanpaths indexed by (participant, stimulus).
class Dataset {
public:
    Dataset() = default;
    /// Scanpaths must have unique (participant, stimulus) pairs and valid fixations.
    explicit Dataset(std::vector<Scanpath> scanpaths, EntityAxis axis = EntityAxis::Participant);

    const std::vector<Scanpath>& scanpaths() const noexcept { return scanpaths_; }
    /// Identifiers in order of first appearance.
    const std::vector<std::string>& participants() const noexcept { return participants_; }
    const std::vector<std::string>& stimuli() const noexcept { return stimuli_; }
    EntityAxis entity_axis() const noexcept { return axis_; }

    /// Identifiers along the entity axis.
    const std::vector<std::string>& entities() const noexcept {
        return axis_ == EntityAxis::Participant ? participants_ : stimuli_;
    }
    /// Entity identifier of a scanpath under the current axis.
    const std::string& entity_of(const Scanpath& s) const noexcept {
        return axis_ == EntityAxis::Participant ? s.participant_id : s.stimulus_id;
    }

    const Scanpath* find(std::string_view participant, std::string_view stimulus) const;

    std::size_t fixation_count() const noexcept;

    Dataset with_axis(EntityAxis axis) const;

    bool operator==(const Dataset& other) const {
        return axis_ == other.axis_ && scanpaths_ == other.scanpaths_;
    }

private:
    std::vector<Scanpath> scanpaths_;
    std::vector<std::string> participants_;
    std::vector<std::string> stimuli_;
    std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
    EntityAxis axis_ = EntityAxis::Participant;
};

struct ParseOptions {
    /// Reject out-of-order and overlapping fixations instead of warning.
    bool strict = false;
};

struct ParseResult {
    std::optional<Dataset> dataset;  // set iff report.accepted()
    ValidationReport report;
};

/// Parses participant_id,stimulus_id,x,y,onset_ms,duration_ms rows.
ParseResult parse_fixation_csv(std::string_view text, const ParseOptions& options = {});

/// Trial sidecar: participant_id,stimulus_id,trial_duration_ms. Errors are
/// appended to `report`; unknown pairs produce warnings.
Dataset apply_trial_sidecar(const Dataset& d, std::string_view text, ValidationReport& report);

/// Canonical CSV form; parse(serialize(d)) == d for accepted datasets.
std::string serialize_fixation_csv(const Dataset& d);

Dataset pivot_entities(const Dataset& d, EntityAxis axis);

std::string_view to_string(EntityAxis axis) noexcept;
std::optional<EntityAxis> parse_entity_axis(std::string_view s) noexcept;

}  // namespace gazecluster
