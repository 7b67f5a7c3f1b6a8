#include <bit>

#include "latdisc/kernels.hpp"

namespace latdisc::kernels::scalar {

BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols) {
  BlockBest best;
  for (std::size_t l = 0; l < low_union.size(); ++l) {
    const unsigned rows = high_pop + low_pop[l];
    const unsigned cols = n_cols - static_cast<unsigned>(std::popcount(static_cast<std::uint16_t>(high_union | low_union[l])));
    const unsigned value = rows * cols;
    if (value > best.value) {
      best.value = value;
      best.index = static_cast<std::uint32_t>(l);
    }
  }
  return best;
}

void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out) {
  for (std::size_t k = 0; k < masks.size(); ++k) {
    out[k] = static_cast<std::uint16_t>(std::popcount(static_cast<std::uint16_t>(masks[k] & y)));
  }
}

}  // namespace latdisc::kernels::scalar
