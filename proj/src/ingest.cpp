#include "gazecluster/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <span>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "gazecluster/text.hpp"

namespace gazecluster {

namespace {

constexpr std::array<std::string_view, 6> kColumns = {
    "participant_id", "stimulus_id", "x", "y", "onset_ms", "duration_ms"};

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct PendingFixation {
    Fixation fixation;
    std::size_t row;
};

struct PendingScanpath {
    std::string participant;
    std::string stimulus;
    std::vector<PendingFixation> fixations;
};

// Maps required column names to their position in the header; reports missing ones.
std::optional<std::vector<std::size_t>> locate_columns(std::string_view header_line,
                                                       std::span<const std::string_view> names,
                                                       ValidationReport& report) {
    auto header = text::split_csv_record(header_line);
    std::vector<std::size_t> positions;
    bool ok = true;
    for (auto name : names) {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            return lowercase(text::trim(h)) == name;
        });
        if (it == header.end()) {
            report.errors.push_back({0, fmt::format("missing required column '{}'", name)});
            ok = false;
        } else {
            positions.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }
    if (!ok) return std::nullopt;
    return positions;
}

}  // namespace

Dataset::Dataset(std::vector<Scanpath> scanpaths, EntityAxis axis)
    : scanpaths_(std::move(scanpaths)), axis_(axis) {
    for (std::size_t i = 0; i < scanpaths_.size(); ++i) {
        const auto& s = scanpaths_[i];
        if (s.fixations.empty())
            throw std::invalid_argument("scanpath " + s.participant_id + "/" + s.stimulus_id +
                                        " has no fixations");
        for (std::size_t f = 0; f < s.fixations.size(); ++f) {
            const auto& fx = s.fixations[f];
            if (!(fx.duration > 0.0) || !std::isfinite(fx.x) || !std::isfinite(fx.y) ||
                !std::isfinite(fx.onset) || !std::isfinite(fx.duration))
                throw std::invalid_argument("invalid fixation in " + s.participant_id + "/" +
                                            s.stimulus_id);
            if (f > 0 && !(fx.onset > s.fixations[f - 1].onset))
                throw std::invalid_argument("fixation onsets not strictly increasing in " +
                                            s.participant_id + "/" + s.stimulus_id);
        }
        auto [it, inserted] = index_.emplace(std::pair{s.participant_id, s.stimulus_id}, i);
        if (!inserted)
            throw std::invalid_argument("duplicate scanpath " + s.participant_id + "/" +
                                        s.stimulus_id);
        if (std::find(participants_.begin(), participants_.end(), s.participant_id) ==
            participants_.end())
            participants_.push_back(s.participant_id);
        if (std::find(stimuli_.begin(), stimuli_.end(), s.stimulus_id) == stimuli_.end())
            stimuli_.push_back(s.stimulus_id);
    }
}

const Scanpath* Dataset::find(std::string_view participant, std::string_view stimulus) const {
    auto it = index_.find(std::pair{std::string(participant), std::string(stimulus)});
    return it == index_.end() ? nullptr : &scanpaths_[it->second];
}

std::size_t Dataset::fixation_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : scanpaths_) n += s.fixations.size();
    return n;
}

Dataset Dataset::with_axis(EntityAxis axis) const {
    Dataset copy = *this;
    copy.axis_ = axis;
    return copy;
}

ParseResult parse_fixation_csv(std::string_view input, const ParseOptions& options) {
    ParseResult result;
    auto& report = result.report;

    auto lines = text::split_lines(input);
    while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) {
        report.errors.push_back({0, "empty file"});
        return result;
    }

    auto columns = locate_columns(lines.front(), kColumns, report);
    if (!columns) return result;
    const auto& col = *columns;
    const std::size_t needed = *std::max_element(col.begin(), col.end()) + 1;

    std::vector<PendingScanpath> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> group_of;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t row = li;
        if (text::trim(lines[li]).empty()) continue;
        auto fields = text::split_csv_record(lines[li]);
        if (fields.size() < needed) {
            report.errors.push_back(
                {row, fmt::format("expected at least {} fields, found {}", needed, fields.size())});
            continue;
        }
        std::string participant(text::trim(fields[col[0]]));
        std::string stimulus(text::trim(fields[col[1]]));
        if (participant.empty() || stimulus.empty()) {
            report.errors.push_back({row, "empty participant_id or stimulus_id"});
            continue;
        }
        std::array<double, 4> values{};
        bool row_ok = true;
        for (std::size_t k = 0; k < 4; ++k) {
            auto v = text::parse_double(fields[col[k + 2]]);
            if (!v) {
                report.errors.push_back({row, fmt::format("non-numeric {} '{}'", kColumns[k + 2],
                                                          fields[col[k + 2]])});
                row_ok = false;
            } else if (!std::isfinite(*v)) {
                report.errors.push_back({row, fmt::format("non-finite {}", kColumns[k + 2])});
                row_ok = false;
            } else {
                values[k] = *v;
            }
        }
        if (!row_ok) continue;
        Fixation fx{values[0], values[1], values[2], values[3]};
        if (!(fx.duration > 0.0)) {
            report.errors.push_back({row, fmt::format("duration_ms must be > 0, got {}",
                                                      text::format_double(fx.duration))});
            continue;
        }
        auto key = std::pair{participant, stimulus};
        auto [it, inserted] = group_of.emplace(key, groups.size());
        if (inserted) groups.push_back({participant, stimulus, {}});
        groups[it->second].fixations.push_back({fx, row});
    }

    std::vector<Scanpath> scanpaths;
    scanpaths.reserve(groups.size());
    for (auto& g : groups) {
        auto& fxs = g.fixations;
        const bool sorted = std::is_sorted(fxs.begin(), fxs.end(), [](const auto& a, const auto& b) {
            return a.fixation.onset < b.fixation.onset;
        });
        if (!sorted) {
            const auto row = fxs.front().row;
            if (options.strict)
                report.errors.push_back(
                    {row, fmt::format("fixations of {}/{} not in onset order", g.participant,
                                      g.stimulus)});
            else
                report.warnings.push_back(
                    {row, fmt::format("fixations of {}/{} re-sorted by onset", g.participant,
                                      g.stimulus)});
            std::stable_sort(fxs.begin(), fxs.end(), [](const auto& a, const auto& b) {
                return a.fixation.onset < b.fixation.onset;
            });
        }
        bool duplicate = false;
        for (std::size_t i = 1; i < fxs.size(); ++i) {
            const auto& prev = fxs[i - 1].fixation;
            const auto& cur = fxs[i].fixation;
            if (cur.onset == prev.onset) {
                report.errors.push_back(
                    {std::max(fxs[i].row, fxs[i - 1].row),
                     fmt::format("duplicate onset {} for {}/{}", text::format_double(cur.onset),
                                 g.participant, g.stimulus)});
                duplicate = true;
            } else if (cur.onset < prev.onset + prev.duration) {
                auto msg = fmt::format("fixation overlaps previous one in {}/{}", g.participant,
                                       g.stimulus);
                if (options.strict)
                    report.errors.push_back({fxs[i].row, std::move(msg)});
                else
                    report.warnings.push_back({fxs[i].row, std::move(msg)});
            }
        }
        if (duplicate) continue;
        if (fxs.size() == 1)
            report.warnings.push_back(
                {fxs.front().row, fmt::format("single-fixation scanpath {}/{}: saccade metrics "
                                              "undefined",
                                              g.participant, g.stimulus)});
        Scanpath s{g.participant, g.stimulus, {}, std::nullopt};
        s.fixations.reserve(fxs.size());
        for (const auto& p : fxs) s.fixations.push_back(p.fixation);
        scanpaths.push_back(std::move(s));
    }

    if (groups.empty() && report.errors.empty()) report.errors.push_back({0, "no data rows"});

    std::sort(report.errors.begin(), report.errors.end(),
              [](const Issue& a, const Issue& b) { return a.row < b.row; });
    std::stable_sort(report.warnings.begin(), report.warnings.end(),
                     [](const Issue& a, const Issue& b) { return a.row < b.row; });

    if (report.accepted()) {
        result.dataset.emplace(std::move(scanpaths));
        report.participant_count = result.dataset->participants().size();
        report.stimulus_count = result.dataset->stimuli().size();
        report.fixation_count = result.dataset->fixation_count();
    }
    return result;
}

Dataset apply_trial_sidecar(const Dataset& d, std::string_view input, ValidationReport& report) {
    static constexpr std::array<std::string_view, 3> kSidecar = {"participant_id", "stimulus_id",
                                                                 "trial_duration_ms"};
    auto lines = text::split_lines(input);
    if (lines.empty()) {
        report.errors.push_back({0, "empty sidecar file"});
        return d;
    }
    auto columns = locate_columns(lines.front(), kSidecar, report);
    if (!columns) return d;
    const auto& col = *columns;

    std::map<std::pair<std::string, std::string>, double> durations;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (text::trim(lines[row]).empty()) continue;
        auto fields = text::split_csv_record(lines[row]);
        if (fields.size() <= *std::max_element(col.begin(), col.end())) {
            report.errors.push_back({row, "sidecar row has too few fields"});
            continue;
        }
        auto v = text::parse_double(fields[col[2]]);
        if (!v || !std::isfinite(*v) || !(*v > 0.0)) {
            report.errors.push_back({row, "trial_duration_ms must be a positive number"});
            continue;
        }
        std::pair key{std::string(text::trim(fields[col[0]])),
                      std::string(text::trim(fields[col[1]]))};
        if (!d.find(key.first, key.second)) {
            report.warnings.push_back(
                {row, fmt::format("sidecar pair {}/{} has no scanpath", key.first, key.second)});
            continue;
        }
        durations[key] = *v;
    }

    std::vector<Scanpath> scanpaths = d.scanpaths();
    for (auto& s : scanpaths) {
        auto it = durations.find({s.participant_id, s.stimulus_id});
        if (it != durations.end()) s.trial_duration_ms = it->second;
    }
    return Dataset(std::move(scanpaths), d.entity_axis());
}

std::string serialize_fixation_csv(const Dataset& d) {
    std::string out = "participant_id,stimulus_id,x,y,onset_ms,duration_ms\n";
    for (const auto& s : d.scanpaths()) {
        const auto pid = text::csv_field(s.participant_id);
        const auto sid = text::csv_field(s.stimulus_id);
        for (const auto& f : s.fixations) {
            out += fmt::format("{},{},{},{},{},{}\n", pid, sid, text::format_double(f.x),
                               text::format_double(f.y), text::format_double(f.onset),
                               text::format_double(f.duration));
        }
    }
    return out;
}

Dataset pivot_entities(const Dataset& d, EntityAxis axis) { return d.with_axis(axis); }

std::string_view to_string(EntityAxis axis) noexcept {
    return axis == EntityAxis::Participant ? "participant" : "stimulus";
}

std::optional<EntityAxis> parse_entity_axis(std::string_view s) noexcept {
    if (s == "participant") return EntityAxis::Participant;
    if (s == "stimulus") return EntityAxis::Stimulus;
    return std::nullopt;
}

}  // namespace gazecluster
