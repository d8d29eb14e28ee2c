#include "gazecluster/hilbert.hpp"

#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace gazecluster {

namespace {

void rotate(std::uint64_t s, std::uint64_t& x, std::uint64_t& y, std::uint64_t rx,
            std::uint64_t ry) noexcept {
    if (ry == 0) {
        if (rx == 1) {
            x = s - 1 - x;
            y = s - 1 - y;
        }
        std::swap(x, y);
    }
}

}  // namespace

GridCell hilbert_d2xy(unsigned order, std::uint64_t d) {
    if (order == 0 || order > 16) throw std::out_of_range("hilbert order must be in [1, 16]");
    const std::uint64_t side = std::uint64_t{1} << order;
    if (d >= side * side)
        throw std::out_of_range(fmt::format("hilbert index {} out of range for order {}", d, order));
    std::uint64_t x = 0, y = 0, t = d;
    for (std::uint64_t s = 1; s < side; s *= 2) {
        const std::uint64_t rx = 1 & (t / 2);
        const std::uint64_t ry = 1 & (t ^ rx);
        rotate(s, x, y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    return {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
}

std::uint64_t hilbert_xy2d(unsigned order, GridCell cell) {
    if (order == 0 || order > 16) throw std::out_of_range("hilbert order must be in [1, 16]");
    const std::uint64_t side = std::uint64_t{1} << order;
    if (cell.col >= side || cell.row >= side) throw std::out_of_range("hilbert cell outside grid");
    std::uint64_t x = cell.col, y = cell.row, d = 0;
    for (std::uint64_t s = side / 2; s > 0; s /= 2) {
        const std::uint64_t rx = (x & s) > 0 ? 1 : 0;
        const std::uint64_t ry = (y & s) > 0 ? 1 : 0;
        d += s * s * ((3 * rx) ^ ry);
        rotate(side, x, y, rx, ry);
    }
    return d;
}

unsigned hilbert_order_for(std::size_t n) noexcept {
    std::size_t root = 1;
    while (root * root < n) ++root;
    unsigned order = 0;
    while ((std::size_t{1} << order) < root) ++order;
    return order == 0 ? 1 : order;
}

}  // namespace gazecluster
