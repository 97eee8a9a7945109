#include <immintrin.h>

#include "gwas/kernels.hpp"

namespace gwas::kernels::avx2 {

namespace {

double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Per-byte popcount via the nibble lookup, summed into four 64-bit lanes.
__m256i popcount_sad(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1,
                                          2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i per_byte = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
  return _mm256_sad_epu8(per_byte, _mm256_setzero_si256());
}

std::uint32_t lane_total(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return static_cast<std::uint32_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double sum = horizontal_sum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double weighted_dot(const double* a, const double* w, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d aw0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(w + i));
    const __m256d aw1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(w + i + 4));
    acc0 = _mm256_fmadd_pd(aw0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(aw1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d aw = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(w + i));
    acc0 = _mm256_fmadd_pd(aw, _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * w[i] * b[i];
  return sum;
}

void decode(const std::uint8_t* packed, std::size_t n, const double* lut, double* out) {
  // permutevar_pd selects within 128-bit lanes using bit 1 of each index, so
  // codes {0,1} and {2,3} are looked up separately and blended on code bit 1.
  const __m256d lut_low = _mm256_setr_pd(lut[0], lut[1], lut[0], lut[1]);
  const __m256d lut_high = _mm256_setr_pd(lut[2], lut[3], lut[2], lut[3]);
  const __m256i shifts = _mm256_setr_epi64x(0, 2, 4, 6);
  const __m256i three = _mm256_set1_epi64x(3);
  const std::size_t full_bytes = n / 4;
  for (std::size_t byte = 0; byte < full_bytes; ++byte) {
    const __m256i codes =
        _mm256_and_si256(_mm256_srlv_epi64(_mm256_set1_epi64x(packed[byte]), shifts), three);
    const __m256i select_bit0 = _mm256_slli_epi64(codes, 1);
    const __m256d low = _mm256_permutevar_pd(lut_low, select_bit0);
    const __m256d high = _mm256_permutevar_pd(lut_high, select_bit0);
    const __m256d use_high = _mm256_castsi256_pd(_mm256_slli_epi64(codes, 62));
    _mm256_storeu_pd(out + 4 * byte, _mm256_blendv_pd(low, high, use_high));
  }
  for (std::size_t i = 4 * full_bytes; i < n; ++i) {
    out[i] = lut[(packed[i >> 2] >> (2 * (i & 3))) & 3u];
  }
}

CodeCounts count_codes(const std::uint8_t* packed, const std::uint8_t* case_mask, std::size_t n) {
  const __m256i odd_bits = _mm256_set1_epi8(0x55);
  __m256i all[4] = {_mm256_setzero_si256(), _mm256_setzero_si256(), _mm256_setzero_si256(),
                    _mm256_setzero_si256()};
  __m256i cases[4] = {_mm256_setzero_si256(), _mm256_setzero_si256(), _mm256_setzero_si256(),
                      _mm256_setzero_si256()};
  const std::size_t full_bytes = n / 4;
  std::size_t byte = 0;
  for (; byte + 32 <= full_bytes; byte += 32) {
    const __m256i g = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(packed + byte));
    const __m256i mask = _mm256_and_si256(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(case_mask + byte)), odd_bits);
    const __m256i low = _mm256_and_si256(g, odd_bits);
    const __m256i high = _mm256_and_si256(_mm256_srli_epi16(g, 1), odd_bits);
    const __m256i match[4] = {
        _mm256_andnot_si256(_mm256_or_si256(low, high), odd_bits),
        _mm256_andnot_si256(high, low),
        _mm256_andnot_si256(low, high),
        _mm256_and_si256(low, high),
    };
    for (int c = 0; c < 4; ++c) {
      all[c] = _mm256_add_epi64(all[c], popcount_sad(match[c]));
      cases[c] = _mm256_add_epi64(cases[c], popcount_sad(_mm256_and_si256(match[c], mask)));
    }
  }
  CodeCounts counts;
  for (int c = 0; c < 4; ++c) {
    counts.all[c] = lane_total(all[c]);
    counts.cases[c] = lane_total(cases[c]);
  }
  for (std::size_t i = 4 * byte; i < n; ++i) {
    const unsigned shift = 2 * (i & 3);
    const unsigned code = (packed[i >> 2] >> shift) & 3u;
    ++counts.all[code];
    if ((case_mask[i >> 2] >> shift) & 1u) ++counts.cases[code];
  }
  return counts;
}

}  // namespace gwas::kernels::avx2
