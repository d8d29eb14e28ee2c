#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazecluster/metrics.hpp"

namespace gazecluster {

struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Linear-light sRGB, unclipped; components outside [0,1] are out of gamut.
struct LinearRgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb8&) const = default;
    std::string hex() const;
};

Lab lch_to_lab(double lightness, double chroma, double hue_deg) noexcept;

/// CIELAB (D65 reference white) -> XYZ -> linear sRGB.
LinearRgb lab_to_linear_srgb(const Lab& lab) noexcept;

/// Full conversion with sRGB transfer curve, per-channel clipping and rounding.
Rgb8 lab_to_srgb8(const Lab& lab) noexcept;

bool in_srgb_gamut(const Lab& lab, double tolerance = 1e-9) noexcept;

/// Hue-per-metric encoding; lightness carries the distance value.
struct ColorSpec {
    std::vector<double> hues;  // by Hilbert slot
    double chroma = 13.0;
    double l_min = 30.0;
    double l_max = 90.0;
    /// false: identical entities are brightest.
    bool invert = false;
    std::array<std::optional<double>, kMetricCount> metric_hue{};

    std::optional<double> hue_of(MetricId m) const noexcept { return metric_hue[index_of(m)]; }
};

inline constexpr double kHueStepDeg = 20.0;

/// Hues 0, 20, 40, ... degrees for n slots.
ColorSpec assign_colors(std::size_t n);

/// Binds slot hues to metrics: the k-th metric in `slot_order` takes hue k.
ColorSpec bind_hues(ColorSpec spec, std::span<const MetricId> slot_order);

double encode_lightness(const ColorSpec& spec, double dhat);

/// Throws std::invalid_argument if dhat is outside [0,1] or the metric has no hue.
Rgb8 encode_cell_color(const ColorSpec& spec, MetricId metric, double dhat);

}  // namespace gazecluster
