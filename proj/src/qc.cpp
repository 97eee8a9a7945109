#include <cmath>

#include "gwas/errors.hpp"
#include "gwas/genotype.hpp"
#include "gwas/kernels.hpp"

namespace gwas {

HweResult hwe_chi_square(std::size_t hom_first, std::size_t het, std::size_t hom_second) {
  const double total = static_cast<double>(hom_first + het + hom_second);
  if (total == 0.0) return {};
  const double q = (2.0 * hom_second + het) / (2.0 * total);
  const double p = 1.0 - q;
  if (q <= 0.0 || p <= 0.0) return {};
  const double expected[3] = {total * p * p, 2.0 * total * p * q, total * q * q};
  const double observed[3] = {static_cast<double>(hom_first), static_cast<double>(het),
                              static_cast<double>(hom_second)};
  double chi = 0.0;
  for (int g = 0; g < 3; ++g) chi += (observed[g] - expected[g]) * (observed[g] - expected[g]) / expected[g];
  return {chi, std::erfc(std::sqrt(chi / 2.0))};
}

namespace {

// Packed mask selecting the individuals HWE is computed on: controls when a
// phenotype is present, everyone otherwise.
std::vector<std::uint8_t> hwe_mask(const GenotypeMatrix& matrix) {
  std::vector<std::uint8_t> mask(matrix.bytes_per_snp(), 0);
  const std::size_t n = matrix.n_individuals();
  const bool use_controls = matrix.has_phenotype() && matrix.control_count() > 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!use_controls || matrix.phenotype()[i] == 0) mask[i >> 2] |= static_cast<std::uint8_t>(3u << (2 * (i & 3)));
  }
  return mask;
}

HweResult hwe_from_counts(const kernels::CodeCounts& counts) {
  return hwe_chi_square(counts.cases[code::hom_a1], counts.cases[code::het], counts.cases[code::hom_a2]);
}

}  // namespace

HweResult hwe_test(const GenotypeMatrix& matrix, std::size_t j) {
  const auto mask = hwe_mask(matrix);
  return hwe_from_counts(kernels::count_codes(matrix.packed_row(j), mask, matrix.n_individuals()));
}

std::vector<std::size_t> qc_pass_indices(const GenotypeMatrix& matrix, const QcThresholds& thresholds) {
  if (!(thresholds.maf_min >= 0.0 && thresholds.maf_min < 0.5)) throw ArgumentError("maf_min must lie in [0, 0.5)");
  if (!(thresholds.hwe_alpha > 0.0 && thresholds.hwe_alpha < 1.0)) {
    throw ArgumentError("hwe_alpha must lie in (0, 1)");
  }
  const auto mask = hwe_mask(matrix);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < matrix.n_snps(); ++j) {
    if (matrix.snp(j).minor_allele_freq < thresholds.maf_min) continue;
    const auto hwe = hwe_from_counts(kernels::count_codes(matrix.packed_row(j), mask, matrix.n_individuals()));
    if (hwe.p_value < thresholds.hwe_alpha) continue;
    keep.push_back(j);
  }
  return keep;
}

GenotypeMatrix qc_filter(const GenotypeMatrix& matrix, const QcThresholds& thresholds) {
  const auto keep = qc_pass_indices(matrix, thresholds);
  if (keep.empty()) throw EmptyResultError("quality control removed every SNP");
  if (keep.size() == matrix.n_snps()) return matrix;
  return matrix.select_snps(keep);
}

}  // namespace gwas
