#pragma once

#include <bit>
#include <cstdint>

namespace qshard {

using Index = std::uint64_t;

constexpr Index pow2(unsigned n) { return Index{1} << n; }

constexpr bool is_power_of_two(Index n) { return std::has_single_bit(n); }

constexpr unsigned log2_exact(Index n) { return static_cast<unsigned>(std::countr_zero(n)); }

constexpr unsigned bit_of(Index value, unsigned pos) {
    return static_cast<unsigned>((value >> pos) & 1U);
}

/// Spreads `value` so that a zero sits at bit `pos`: bits >= pos shift up by one.
constexpr Index insert_zero_bit(Index value, unsigned pos) {
    const Index low = value & (pow2(pos) - 1);
    return ((value >> pos) << (pos + 1)) | low;
}

/// Two zeros inserted; requires lo < hi.
constexpr Index insert_two_zero_bits(Index value, unsigned lo, unsigned hi) {
    return insert_zero_bit(insert_zero_bit(value, lo), hi);
}

constexpr Index reverse_bits(Index value, unsigned width) {
    Index out = 0;
    for (unsigned i = 0; i < width; ++i) {
        out |= Index{bit_of(value, i)} << (width - 1 - i);
    }
    return out;
}

}  // namespace qshard
