#pragma once

#include <cstddef>
#include <cstdint>

namespace gazecluster {

struct GridCell {
    std::uint32_t col = 0;
    std::uint32_t row = 0;

    bool operator==(const GridCell&) const = default;
};

/// Hilbert index -> cell on a 2^order square; d = 0 maps to (0, 0).
/// Throws std::out_of_range if d >= 4^order.
GridCell hilbert_d2xy(unsigned order, std::uint64_t d);

/// Inverse of hilbert_d2xy.
std::uint64_t hilbert_xy2d(unsigned order, GridCell cell);

/// Smallest order whose square holds n cells: ceil(log2(ceil(sqrt(n)))), at least 1.
unsigned hilbert_order_for(std::size_t n) noexcept;

constexpr std::size_t hilbert_side(unsigned order) noexcept { return std::size_t{1} << order; }

}  // namespace gazecluster
