#include "gazecluster/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "gazecluster/text.hpp"

namespace gazecluster {

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so the
// mapping to [0,1) is done here to keep generated files identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(Range r) { return r.lo + (r.hi - r.lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

Range parse_range(std::string_view field, std::string_view value) {
    auto colon = value.find(':');
    auto lo = text::parse_double(value.substr(0, colon));
    auto hi = colon == std::string_view::npos ? lo : text::parse_double(value.substr(colon + 1));
    if (!lo || !hi || !std::isfinite(*lo) || !std::isfinite(*hi) || *lo > *hi || *lo < 0.0)
        throw std::invalid_argument(fmt::format("bad range for {}: '{}'", field, value));
    return {*lo, *hi};
}

double reflect(double v, double limit) {
    while (v < 0.0 || v > limit) v = v < 0.0 ? -v : 2.0 * limit - v;
    return v;
}

// Division by a power of ten keeps the printed form short (123.4, not 123.40000000000001).
double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

std::vector<GroupSpec> parse_group_spec(std::string_view spec) {
    std::vector<GroupSpec> groups;
    while (!spec.empty()) {
        auto semi = spec.find(';');
        auto item = text::trim(spec.substr(0, semi));
        spec = semi == std::string_view::npos ? std::string_view{} : spec.substr(semi + 1);
        if (item.empty()) continue;

        GroupSpec g;
        g.name = std::string(1, static_cast<char>('A' + groups.size() % 26));
        for (const auto& raw : text::split_csv_record(item)) {
            auto field = text::trim(raw);
            auto eq = field.find('=');
            if (eq == std::string_view::npos)
                throw std::invalid_argument(fmt::format("group field '{}' is not key=value", field));
            auto key = text::trim(field.substr(0, eq));
            auto value = text::trim(field.substr(eq + 1));
            if (key == "name") {
                if (value.empty()) throw std::invalid_argument("empty group name");
                g.name = std::string(value);
            } else if (key == "n") {
                auto n = text::parse_double(value);
                if (!n || *n < 1 || *n != std::floor(*n))
                    throw std::invalid_argument(fmt::format("bad group size '{}'", value));
                g.count = static_cast<std::size_t>(*n);
            } else if (key == "fix") {
                g.avg_fix = parse_range(key, value);
                if (g.avg_fix.lo <= 0.0) throw std::invalid_argument("fixation duration must be > 0");
            } else if (key == "sac") {
                g.avg_sac = parse_range(key, value);
            } else if (key == "fixations") {
                g.fixations = parse_range(key, value);
                if (g.fixations.lo < 1.0) throw std::invalid_argument("fixations per scanpath must be >= 1");
            } else {
                throw std::invalid_argument(fmt::format("unknown group field '{}'", key));
            }
        }
        groups.push_back(std::move(g));
    }
    if (groups.empty()) throw std::invalid_argument("group spec defines no groups");
    return groups;
}

std::string default_group_spec() {
    return "name=focal,n=20,fix=320:380,sac=50:80;name=ambient,n=20,fix=170:220,sac=180:240";
}

SynthOutput synthesize(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.groups.empty()) throw std::invalid_argument("synthesize: no groups");
    if (spec.stimuli == 0) throw std::invalid_argument("synthesize: need at least one stimulus");
    Rng rng(seed);

    std::vector<std::size_t> membership;
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        membership.insert(membership.end(), spec.groups[g].count, g);
    // Fisher-Yates so group members are interleaved in participant order.
    for (std::size_t i = membership.size(); i > 1; --i) std::swap(membership[i - 1], membership[rng.index(i)]);

    const auto p_width = fmt::format("{}", membership.size()).size();
    const auto s_width = fmt::format("{}", spec.stimuli).size();

    std::vector<Scanpath> scanpaths;
    scanpaths.reserve(membership.size() * spec.stimuli);
    for (std::size_t p = 0; p < membership.size(); ++p) {
        const auto& group = spec.groups[membership[p]];
        const double fix_mean = rng.uniform(group.avg_fix);
        const double sac_mean = rng.uniform(group.avg_sac);
        const auto pid = fmt::format("P{:0{}}", p + 1, p_width);
        for (std::size_t s = 0; s < spec.stimuli; ++s) {
            Scanpath path{pid, fmt::format("S{:0{}}", s + 1, s_width), {}, std::nullopt};
            const auto count = static_cast<std::size_t>(std::floor(rng.uniform(
                {group.fixations.lo, group.fixations.hi + 1.0 - 1e-9})));
            double x = rng.uniform({0.0, spec.width});
            double y = rng.uniform({0.0, spec.height});
            double onset = 0.0;
            for (std::size_t f = 0; f < count; ++f) {
                const double duration = std::max(1.0, std::round(fix_mean * rng.uniform({0.75, 1.25})));
                path.fixations.push_back({round_tenth(x), round_tenth(y), onset, duration});
                const double amplitude = sac_mean * rng.uniform({0.5, 1.5});
                const double angle = 2.0 * std::numbers::pi * rng.uniform();
                x = reflect(x + amplitude * std::cos(angle), spec.width);
                y = reflect(y + amplitude * std::sin(angle), spec.height);
                onset += duration + std::round(rng.uniform({20.0, 60.0}));
            }
            scanpaths.push_back(std::move(path));
        }
    }
    return {Dataset(std::move(scanpaths)), std::move(membership)};
}

}  // namespace gazecluster
