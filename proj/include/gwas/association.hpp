#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "gwas/firth.hpp"
#include "gwas/genotype.hpp"

namespace gwas {

struct TrendResult {
  std::size_t snp_index = 0;
  double statistic = 0.0;  // 1-df chi-square
  double p_value = 1.0;
};

// Per-genotype case/total tallies with missing genotypes excluded; index is the
// minor-allele count.
struct TrendTable {
  std::array<double, 3> totals{};
  std::array<double, 3> cases{};
};

// Trend statistic for a 2x3 table with genotype scores `scores`; nullopt when
// the table has a single observed genotype or a single class.
std::optional<double> trend_statistic(const TrendTable& table, const std::array<double, 3>& scores = {0.0, 1.0, 2.0});

TrendTable trend_table(const GenotypeMatrix& matrix, std::size_t snp_index);

// Upper tail of the chi-square distribution with one degree of freedom.
double chi_square_1df_sf(double statistic);

// nullopt for a constant SNP; throws DegenerateResponseError when the
// phenotype has a single class.
std::optional<TrendResult> cochran_armitage(const GenotypeMatrix& matrix, std::size_t snp_index);

struct Ranking {
  enum class Source { trend, score };
  std::vector<std::size_t> snps;  // best first
  std::vector<double> scores;     // aligned, non-increasing
  Source source = Source::trend;

  std::size_t size() const noexcept { return snps.size(); }
};

Ranking rank_marginal(const GenotypeMatrix& matrix, unsigned threads = 1);
Ranking rank_conditional(const GenotypeMatrix& matrix, const FitResult& fitted, const DesignSpec& design,
                         unsigned threads = 1);

// Indices (into p_values) rejected by the Benjamini-Hochberg step-up at level alpha.
std::vector<std::size_t> benjamini_hochberg(std::span<const double> p_values, double alpha);

struct SingleMarkerResult {
  std::vector<TrendResult> tests;      // testable SNPs in map order
  std::vector<std::size_t> rejected;   // SNP indices, ascending
};

SingleMarkerResult single_marker_analysis(const GenotypeMatrix& matrix, double alpha, unsigned threads = 1);
std::vector<std::size_t> single_marker_bh(const GenotypeMatrix& matrix, double alpha, unsigned threads = 1);

// TSV: snp_id chrom pos statistic p_value bh_rejected
void write_association_tsv(const GenotypeMatrix& matrix, const SingleMarkerResult& result, double alpha,
                           const std::filesystem::path& path);

}  // namespace gwas
