#include <cstdlib>
#include <cstring>

#include "latdisc/kernels.hpp"

namespace latdisc::kernels {

bool avx2_available() {
#ifdef LATDISC_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  return supported;
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend chosen = [] {
    const char* forced = std::getenv("LATDISC_KERNEL");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Backend::scalar;
    return avx2_available() ? Backend::avx2 : Backend::scalar;
  }();
  return chosen;
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols) {
#ifdef LATDISC_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2::max_rect_block(low_union, low_pop, high_union, high_pop, n_cols);
#endif
  return scalar::max_rect_block(low_union, low_pop, high_union, high_pop, n_cols);
}

void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out) {
#ifdef LATDISC_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2::and_popcount(masks, y, out);
#endif
  scalar::and_popcount(masks, y, out);
}

}  // namespace latdisc::kernels
