#include "gwas/kernels.hpp"

namespace gwas::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double weighted_dot(const double* a, const double* w, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * w[i] * b[i];
  return sum;
}

void decode(const std::uint8_t* packed, std::size_t n, const double* lut, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned code = (packed[i >> 2] >> (2 * (i & 3))) & 3u;
    out[i] = lut[code];
  }
}

CodeCounts count_codes(const std::uint8_t* packed, const std::uint8_t* case_mask, std::size_t n) {
  CodeCounts counts;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned shift = 2 * (i & 3);
    const unsigned code = (packed[i >> 2] >> shift) & 3u;
    ++counts.all[code];
    if ((case_mask[i >> 2] >> shift) & 1u) ++counts.cases[code];
  }
  return counts;
}

}  // namespace gwas::kernels::scalar
