#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gwas {

// Raw 2-bit PLINK codes as stored in a .bed row.
namespace code {
inline constexpr std::uint8_t hom_a1 = 0;
inline constexpr std::uint8_t missing = 1;
inline constexpr std::uint8_t het = 2;
inline constexpr std::uint8_t hom_a2 = 3;
}  // namespace code

struct SnpMeta {
  std::string snp_id;
  int chromosome = 0;
  std::int64_t position_bp = 0;
  double position_cm = 0.0;
  std::string allele_a;  // .bim column 5
  std::string allele_b;  // .bim column 6
  // Dosages count allele_a when true, allele_b otherwise. Chosen on load so
  // that the counted allele is the minor one (ties keep allele_a).
  bool counts_allele_a = true;
  double minor_allele_freq = 0.0;
  double missing_rate = 0.0;
  std::size_t map_index = 0;
};

struct Individual {
  std::string family_id;
  std::string individual_id;
  std::string father_id = "0";
  std::string mother_id = "0";
  int sex = 0;
};

// 1 = case, 0 = control, -1 = missing.
using PhenotypeLabels = std::vector<std::int8_t>;

// Immutable n x p genotype matrix, SNP-major with 2 bits per genotype.
// Copies share the packed payload, so re-labelling phenotypes is cheap.
class GenotypeMatrix {
 public:
  GenotypeMatrix() = default;

  // Validates and computes per-SNP statistics. `packed` holds p rows of
  // ceil(n/4) bytes each, with padding bits set to zero.
  GenotypeMatrix(std::size_t n_individuals, std::vector<SnpMeta> snps, std::vector<std::uint8_t> packed,
                 std::vector<Individual> individuals, std::optional<PhenotypeLabels> phenotype = std::nullopt,
                 std::optional<Eigen::MatrixXd> covariates = std::nullopt);

  // Builds a matrix from allele_a counts (0, 1, 2, or -1 for missing), one
  // vector per SNP. Metadata is synthesized: chromosome 1, positions 1000*j.
  static GenotypeMatrix from_counts(const std::vector<std::vector<int>>& columns,
                                    std::optional<PhenotypeLabels> phenotype = std::nullopt);

  std::size_t n_individuals() const noexcept { return n_; }
  std::size_t n_snps() const noexcept { return snps_.size(); }
  std::size_t bytes_per_snp() const noexcept { return (n_ + 3) / 4; }

  const SnpMeta& snp(std::size_t j) const { return snps_.at(j); }
  const std::vector<SnpMeta>& snps() const noexcept { return snps_; }
  const std::vector<Individual>& individuals() const noexcept { return individuals_; }

  std::span<const std::uint8_t> packed_row(std::size_t j) const;
  std::span<const std::uint8_t> packed_data() const noexcept;

  std::uint8_t raw_code(std::size_t i, std::size_t j) const;
  // Minor-allele count, nullopt when missing.
  std::optional<int> dosage(std::size_t i, std::size_t j) const;

  // Dosage per raw code with missing mapped to the non-missing mean.
  const std::array<double, 4>& imputed_lut(std::size_t j) const { return imputed_lut_.at(j); }
  // Dosage per raw code with missing mapped to 0 (used for counting).
  std::array<double, 4> dosage_lut(std::size_t j) const;
  std::size_t non_missing_count(std::size_t j) const { return non_missing_.at(j); }

  bool has_phenotype() const noexcept { return phenotype_.has_value(); }
  const PhenotypeLabels& phenotype() const;
  // True when a phenotype is present and no label is missing.
  bool phenotype_complete() const noexcept;
  // Phenotype as 0/1 doubles; requires phenotype_complete().
  const std::vector<double>& response() const;
  // Packed case mask (0b11 per case slot); requires a phenotype.
  std::span<const std::uint8_t> case_mask() const;
  std::size_t case_count() const noexcept { return case_count_; }
  std::size_t control_count() const noexcept { return control_count_; }

  bool has_covariates() const noexcept { return covariates_.has_value(); }
  const Eigen::MatrixXd& covariates() const;
  std::size_t n_covariates() const noexcept { return covariates_ ? static_cast<std::size_t>(covariates_->cols()) : 0; }

  GenotypeMatrix with_phenotype(PhenotypeLabels phenotype) const;
  GenotypeMatrix with_covariates(Eigen::MatrixXd covariates) const;
  GenotypeMatrix without_phenotype() const;
  // Keeps the listed SNPs (ascending indices) in order.
  GenotypeMatrix select_snps(std::span<const std::size_t> indices) const;
  // Keeps the listed individuals (ascending indices); repacks genotypes.
  GenotypeMatrix select_individuals(std::span<const std::size_t> indices) const;
  // Drops individuals whose phenotype is missing.
  GenotypeMatrix drop_missing_phenotype() const;

  std::optional<std::size_t> find_snp(const std::string& snp_id) const;

  friend bool operator==(const GenotypeMatrix& a, const GenotypeMatrix& b);

 private:
  void finalize_phenotype();

  std::size_t n_ = 0;
  std::vector<SnpMeta> snps_;
  std::shared_ptr<const std::vector<std::uint8_t>> packed_;
  std::vector<Individual> individuals_;
  std::vector<std::array<double, 4>> imputed_lut_;
  std::vector<std::size_t> non_missing_;
  std::optional<PhenotypeLabels> phenotype_;
  std::vector<double> response_;
  std::vector<std::uint8_t> case_mask_;
  std::size_t case_count_ = 0;
  std::size_t control_count_ = 0;
  std::optional<Eigen::MatrixXd> covariates_;
};

// PLINK 1 binary triple; only SNP-major (.bed mode 0x01) is supported.
GenotypeMatrix load_plink(const std::filesystem::path& bed, const std::filesystem::path& bim,
                          const std::filesystem::path& fam);
GenotypeMatrix load_plink(const std::filesystem::path& prefix);
void write_plink(const GenotypeMatrix& matrix, const std::filesystem::path& prefix);
// Rewrites only the .fam file (phenotype column from `phenotype`).
void write_fam(const GenotypeMatrix& matrix, const std::filesystem::path& path);
PhenotypeLabels read_fam_phenotype(const std::filesystem::path& path, std::size_t expected_rows);

// Whitespace separated: FID IID cov1 ... covc, optional header line starting
// with FID. Rows must follow .fam order.
Eigen::MatrixXd read_covariates(const std::filesystem::path& path, const GenotypeMatrix& matrix);

struct HweResult {
  double chi_square = 0.0;
  double p_value = 1.0;
};

// 1-df chi-square goodness of fit from genotype counts (hom, het, hom).
HweResult hwe_chi_square(std::size_t hom_first, std::size_t het, std::size_t hom_second);
HweResult hwe_test(const GenotypeMatrix& matrix, std::size_t j);

struct QcThresholds {
  double maf_min = 0.01;
  double hwe_alpha = 1e-4;
};

GenotypeMatrix qc_filter(const GenotypeMatrix& matrix, const QcThresholds& thresholds);
std::vector<std::size_t> qc_pass_indices(const GenotypeMatrix& matrix, const QcThresholds& thresholds);

// Pearson correlation of mean-imputed columns; nullopt when either column is
// constant.
std::optional<double> correlation(const GenotypeMatrix& matrix, std::size_t j, std::size_t k);

// Mean-imputed minor-allele counts. Throws ValidationError for an all-missing column.
std::vector<double> genotype_column(const GenotypeMatrix& matrix, std::size_t j);
void genotype_column(const GenotypeMatrix& matrix, std::size_t j, std::span<double> out);

// Caches standardized columns so repeated correlation queries cost one dot product.
class CorrelationCache {
 public:
  explicit CorrelationCache(const GenotypeMatrix& matrix) : matrix_(matrix) {}
  std::optional<double> operator()(std::size_t j, std::size_t k);

 private:
  const std::vector<double>* standardized(std::size_t j);

  const GenotypeMatrix& matrix_;
  std::vector<std::optional<std::vector<double>>> columns_;
  std::vector<bool> constant_;
};

int parse_chromosome(const std::string& token);

}  // namespace gwas
