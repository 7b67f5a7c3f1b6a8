// Compiled with -mavx2 -mpopcnt; only reached when the CPU reports AVX2.

#include <immintrin.h>

#include <algorithm>

#include "latdisc/kernels.hpp"

namespace latdisc::kernels::avx2 {

namespace {

// Per-lane popcount of 16-bit lanes through a nibble lookup table.
inline __m256i popcount_epi16(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i nibble = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, nibble);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), nibble);
  const __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_add_epi16(_mm256_and_si256(bytes, _mm256_set1_epi16(0x00ff)), _mm256_srli_epi16(bytes, 8));
}

inline __m256i block_values(const std::uint16_t* low_union, const std::uint8_t* low_pop, __m256i high,
                            __m256i high_pop, __m256i cols) {
  const __m256i u = _mm256_or_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(low_union)), high);
  const __m256i free_cols = _mm256_sub_epi16(cols, popcount_epi16(u));
  const __m256i rows = _mm256_add_epi16(
      high_pop, _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(low_pop))));
  return _mm256_mullo_epi16(rows, free_cols);
}

inline std::uint16_t horizontal_max_epu16(__m256i v) {
  __m128i m = _mm_max_epu16(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
  m = _mm_max_epu16(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(1, 0, 3, 2)));
  m = _mm_max_epu16(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(2, 3, 0, 1)));
  m = _mm_max_epu16(m, _mm_shufflelo_epi16(m, _MM_SHUFFLE(2, 3, 0, 1)));
  return static_cast<std::uint16_t>(_mm_extract_epi16(m, 0));
}

}  // namespace

BlockBest max_rect_block(std::span<const std::uint16_t> low_union, std::span<const std::uint8_t> low_pop,
                         std::uint16_t high_union, unsigned high_pop, unsigned n_cols) {
  const std::size_t len = low_union.size();
  const std::size_t vec_len = len & ~static_cast<std::size_t>(15);
  const __m256i high = _mm256_set1_epi16(static_cast<short>(high_union));
  const __m256i hp = _mm256_set1_epi16(static_cast<short>(high_pop));
  const __m256i cols = _mm256_set1_epi16(static_cast<short>(n_cols));

  __m256i vmax = _mm256_setzero_si256();
  for (std::size_t l = 0; l < vec_len; l += 16) {
    vmax = _mm256_max_epu16(vmax, block_values(low_union.data() + l, low_pop.data() + l, high, hp, cols));
  }
  unsigned best = vec_len ? horizontal_max_epu16(vmax) : 0;
  const BlockBest tail = scalar::max_rect_block(low_union.subspan(vec_len), low_pop.subspan(vec_len), high_union,
                                                high_pop, n_cols);
  best = std::max<unsigned>(best, tail.value);
  if (best == 0) return {};

  const __m256i target = _mm256_set1_epi16(static_cast<short>(best));
  for (std::size_t l = 0; l < vec_len; l += 16) {
    const __m256i eq = _mm256_cmpeq_epi16(block_values(low_union.data() + l, low_pop.data() + l, high, hp, cols), target);
    const auto bits = static_cast<unsigned>(_mm256_movemask_epi8(eq));
    if (bits != 0) return {best, static_cast<std::uint32_t>(l + static_cast<std::size_t>(__builtin_ctz(bits) / 2))};
  }
  return {best, static_cast<std::uint32_t>(vec_len + tail.index)};
}

void and_popcount(std::span<const std::uint16_t> masks, std::uint16_t y, std::span<std::uint16_t> out) {
  const std::size_t len = masks.size();
  const std::size_t vec_len = len & ~static_cast<std::size_t>(15);
  const __m256i vy = _mm256_set1_epi16(static_cast<short>(y));
  for (std::size_t k = 0; k < vec_len; k += 16) {
    const __m256i m = _mm256_and_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(masks.data() + k)), vy);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + k), popcount_epi16(m));
  }
  scalar::and_popcount(masks.subspan(vec_len), y, out.subspan(vec_len));
}

}  // namespace latdisc::kernels::avx2
