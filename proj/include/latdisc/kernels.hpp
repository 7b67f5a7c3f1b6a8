#pragma once

// Bitmask inner loops of the exact searchers. Each kernel has a scalar
// reference implementation and, on x86-64 builds, an AVX2 variant; the
// dispatching entry points pick one at runtime from the CPU features.
// Setting LATDISC_KERNEL=scalar in the environment forces the reference path.

#include <cstdint>
#include <span>

namespace latdisc::kernels {

enum class Backend { scalar, avx2 };

/// AVX2 compiled in and supported by this CPU.
bool avx2_available();
Backend active_backend();
const char* backend_name(Backend b);

struct BlockBest {
  std::uint32_t value = 0;
  std::uint32_t index = 0;  // first index attaining value
};

/// Block of the empty-rectangle scan. Row subsets X = H + l share a fixed high
/// part H (union of column masks `high_union`, |H| = `high_pop`) and vary the
/// low part l. For each l the value is |X| * (n_cols - |U(X)|) with
/// U(X) = high_union | low_union[l], |X| = high_pop + low_pop[l].
/// Masks hold at most 16 columns. Returns the maximum and its first index.
BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols);

/// out[k] = popcount(masks[k] & y)
void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out);

namespace scalar {
BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols);
void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out);
}  // namespace scalar

#ifdef LATDISC_HAVE_AVX2
namespace avx2 {
BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols);
void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out);
}  // namespace avx2
#endif

}  // namespace latdisc::kernels
