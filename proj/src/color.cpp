#include "gazecluster/color.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace gazecluster {

namespace {

// D65 reference white, Y normalized to 1.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

double lab_f_inverse(double t) noexcept {
    constexpr double delta = 6.0 / 29.0;
    return t > delta ? t * t * t : 3.0 * delta * delta * (t - 4.0 / 29.0);
}

double srgb_encode(double linear) noexcept {
    return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

std::uint8_t to_byte(double linear) noexcept {
    const double v = std::clamp(srgb_encode(std::clamp(linear, 0.0, 1.0)), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

std::string Rgb8::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

Lab lch_to_lab(double lightness, double chroma, double hue_deg) noexcept {
    const double h = hue_deg * std::numbers::pi / 180.0;
    return {lightness, chroma * std::cos(h), chroma * std::sin(h)};
}

LinearRgb lab_to_linear_srgb(const Lab& lab) noexcept {
    const double fy = (lab.l + 16.0) / 116.0;
    const double fx = fy + lab.a / 500.0;
    const double fz = fy - lab.b / 200.0;
    const double x = kWhiteX * lab_f_inverse(fx);
    const double y = kWhiteY * lab_f_inverse(fy);
    const double z = kWhiteZ * lab_f_inverse(fz);
    return {
        3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
        -0.9692660 * x + 1.8760108 * y + 0.0415560 * z,
        0.0556434 * x - 0.2040259 * y + 1.0572252 * z,
    };
}

Rgb8 lab_to_srgb8(const Lab& lab) noexcept {
    const auto lin = lab_to_linear_srgb(lab);
    return {to_byte(lin.r), to_byte(lin.g), to_byte(lin.b)};
}

bool in_srgb_gamut(const Lab& lab, double tolerance) noexcept {
    const auto lin = lab_to_linear_srgb(lab);
    auto inside = [tolerance](double v) { return v >= -tolerance && v <= 1.0 + tolerance; };
    return inside(lin.r) && inside(lin.g) && inside(lin.b);
}

ColorSpec assign_colors(std::size_t n) {
    if (n == 0) throw std::invalid_argument("assign_colors: need at least one metric");
    ColorSpec spec;
    spec.hues.resize(n);
    for (std::size_t k = 0; k < n; ++k) spec.hues[k] = kHueStepDeg * static_cast<double>(k);
    return spec;
}

ColorSpec bind_hues(ColorSpec spec, std::span<const MetricId> slot_order) {
    if (slot_order.size() > spec.hues.size())
        throw std::invalid_argument("bind_hues: more metrics than hues");
    spec.metric_hue.fill(std::nullopt);
    for (std::size_t k = 0; k < slot_order.size(); ++k)
        spec.metric_hue[index_of(slot_order[k])] = spec.hues[k];
    return spec;
}

double encode_lightness(const ColorSpec& spec, double dhat) {
    if (!(dhat >= 0.0 && dhat <= 1.0))
        throw std::invalid_argument(fmt::format("normalized distance {} outside [0,1]", dhat));
    const double span = spec.l_max - spec.l_min;
    return spec.invert ? spec.l_min + span * dhat : spec.l_max - span * dhat;
}

Rgb8 encode_cell_color(const ColorSpec& spec, MetricId metric, double dhat) {
    const auto hue = spec.hue_of(metric);
    if (!hue) throw std::invalid_argument(fmt::format("no hue bound for {}", metric_name(metric)));
    return lab_to_srgb8(lch_to_lab(encode_lightness(spec, dhat), spec.chroma, *hue));
}

}  // namespace gazecluster
