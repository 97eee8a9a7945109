#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gwas/errors.hpp"
#include "gwas/genotype.hpp"
#include "gwas/kernels.hpp"

namespace gwas {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint8_t code_for_count(int count_a) {
  switch (count_a) {
    case 2:
      return code::hom_a1;
    case 1:
      return code::het;
    case 0:
      return code::hom_a2;
    case -1:
      return code::missing;
    default:
      throw ValidationError("genotype count " + std::to_string(count_a) + " outside {0, 1, 2, missing}");
  }
}

}  // namespace

GenotypeMatrix::GenotypeMatrix(std::size_t n_individuals, std::vector<SnpMeta> snps, std::vector<std::uint8_t> packed,
                               std::vector<Individual> individuals, std::optional<PhenotypeLabels> phenotype,
                               std::optional<Eigen::MatrixXd> covariates)
    : n_(n_individuals),
      snps_(std::move(snps)),
      individuals_(std::move(individuals)),
      phenotype_(std::move(phenotype)),
      covariates_(std::move(covariates)) {
  const std::size_t row_bytes = bytes_per_snp();
  if (packed.size() != snps_.size() * row_bytes) {
    throw SizeError("packed genotype payload has " + std::to_string(packed.size()) + " bytes, expected " +
                    std::to_string(snps_.size() * row_bytes));
  }
  if (individuals_.empty() && n_ > 0) {
    individuals_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      individuals_[i].family_id = "F" + std::to_string(i + 1);
      individuals_[i].individual_id = "I" + std::to_string(i + 1);
    }
  }
  if (individuals_.size() != n_) throw ValidationError("individual count does not match n");
  if (covariates_ && static_cast<std::size_t>(covariates_->rows()) != n_) {
    throw ValidationError("covariate rows do not match n");
  }
  for (std::size_t j = 1; j < snps_.size(); ++j) {
    const auto& prev = snps_[j - 1];
    const auto& cur = snps_[j];
    if (cur.chromosome < prev.chromosome ||
        (cur.chromosome == prev.chromosome && cur.position_bp <= prev.position_bp)) {
      throw ValidationError("SNPs not strictly ordered by (chromosome, position) at " + cur.snp_id);
    }
  }

  packed_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(packed));
  const std::vector<std::uint8_t> no_cases(row_bytes, 0);
  imputed_lut_.resize(snps_.size());
  non_missing_.resize(snps_.size());
  for (std::size_t j = 0; j < snps_.size(); ++j) {
    auto& meta = snps_[j];
    if (meta.allele_a == meta.allele_b || meta.allele_a.empty() || meta.allele_b.empty() ||
        meta.allele_a.find(',') != std::string::npos || meta.allele_b.find(',') != std::string::npos) {
      throw ValidationError("SNP " + meta.snp_id + " is not biallelic");
    }
    const auto counts = kernels::count_codes(packed_row(j), no_cases, n_);
    const std::size_t observed = counts.all[code::hom_a1] + counts.all[code::het] + counts.all[code::hom_a2];
    const double a1_alleles = 2.0 * counts.all[code::hom_a1] + counts.all[code::het];
    const double freq_a1 = observed > 0 ? a1_alleles / (2.0 * observed) : 0.0;
    meta.map_index = j;
    meta.counts_allele_a = freq_a1 <= 0.5;
    meta.minor_allele_freq = std::min(freq_a1, 1.0 - freq_a1);
    meta.missing_rate = n_ > 0 ? static_cast<double>(counts.all[code::missing]) / n_ : 0.0;
    non_missing_[j] = observed;
    const double mean = observed > 0 ? 2.0 * meta.minor_allele_freq : kNaN;
    imputed_lut_[j] = meta.counts_allele_a ? std::array<double, 4>{2.0, mean, 1.0, 0.0}
                                           : std::array<double, 4>{0.0, mean, 1.0, 2.0};
  }
  finalize_phenotype();
}

void GenotypeMatrix::finalize_phenotype() {
  response_.clear();
  case_mask_.clear();
  case_count_ = control_count_ = 0;
  if (!phenotype_) return;
  if (phenotype_->size() != n_) throw ValidationError("phenotype length does not match n");
  case_mask_.assign(bytes_per_snp(), 0);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto label = (*phenotype_)[i];
    if (label == 1) {
      ++case_count_;
      case_mask_[i >> 2] |= static_cast<std::uint8_t>(3u << (2 * (i & 3)));
    } else if (label == 0) {
      ++control_count_;
    } else if (label != -1) {
      throw ValidationError("phenotype label must be 1, 0 or -1");
    }
  }
  if (phenotype_complete()) {
    response_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) response_[i] = (*phenotype_)[i];
  }
}

GenotypeMatrix GenotypeMatrix::from_counts(const std::vector<std::vector<int>>& columns,
                                           std::optional<PhenotypeLabels> phenotype) {
  const std::size_t n = columns.empty() ? (phenotype ? phenotype->size() : 0) : columns.front().size();
  const std::size_t row_bytes = (n + 3) / 4;
  std::vector<std::uint8_t> packed(columns.size() * row_bytes, 0);
  std::vector<SnpMeta> snps(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) throw ValidationError("ragged genotype columns");
    for (std::size_t i = 0; i < n; ++i) {
      packed[j * row_bytes + (i >> 2)] |= static_cast<std::uint8_t>(code_for_count(columns[j][i]) << (2 * (i & 3)));
    }
    snps[j].snp_id = "snp" + std::to_string(j + 1);
    snps[j].chromosome = 1;
    snps[j].position_bp = 1000 * static_cast<std::int64_t>(j + 1);
    snps[j].allele_a = "A";
    snps[j].allele_b = "G";
  }
  return GenotypeMatrix(n, std::move(snps), std::move(packed), {}, std::move(phenotype));
}

std::span<const std::uint8_t> GenotypeMatrix::packed_row(std::size_t j) const {
  if (j >= snps_.size()) throw ArgumentError("SNP index out of range");
  return std::span<const std::uint8_t>(*packed_).subspan(j * bytes_per_snp(), bytes_per_snp());
}

std::span<const std::uint8_t> GenotypeMatrix::packed_data() const noexcept {
  if (!packed_) return {};
  return *packed_;
}

std::uint8_t GenotypeMatrix::raw_code(std::size_t i, std::size_t j) const {
  if (i >= n_) throw ArgumentError("individual index out of range");
  return (packed_row(j)[i >> 2] >> (2 * (i & 3))) & 3u;
}

std::optional<int> GenotypeMatrix::dosage(std::size_t i, std::size_t j) const {
  const auto c = raw_code(i, j);
  if (c == code::missing) return std::nullopt;
  return static_cast<int>(imputed_lut_[j][c]);
}

std::array<double, 4> GenotypeMatrix::dosage_lut(std::size_t j) const {
  auto lut = imputed_lut_.at(j);
  lut[code::missing] = 0.0;
  return lut;
}

const PhenotypeLabels& GenotypeMatrix::phenotype() const {
  if (!phenotype_) throw ValidationError("dataset has no phenotype");
  return *phenotype_;
}

bool GenotypeMatrix::phenotype_complete() const noexcept {
  return phenotype_ && case_count_ + control_count_ == n_;
}

const std::vector<double>& GenotypeMatrix::response() const {
  if (!phenotype_complete()) throw ValidationError("phenotype missing or incomplete");
  return response_;
}

std::span<const std::uint8_t> GenotypeMatrix::case_mask() const {
  if (!phenotype_) throw ValidationError("dataset has no phenotype");
  return case_mask_;
}

const Eigen::MatrixXd& GenotypeMatrix::covariates() const {
  if (!covariates_) throw ValidationError("dataset has no covariates");
  return *covariates_;
}

GenotypeMatrix GenotypeMatrix::with_phenotype(PhenotypeLabels phenotype) const {
  GenotypeMatrix copy = *this;
  copy.phenotype_ = std::move(phenotype);
  copy.finalize_phenotype();
  return copy;
}

GenotypeMatrix GenotypeMatrix::with_covariates(Eigen::MatrixXd covariates) const {
  if (static_cast<std::size_t>(covariates.rows()) != n_) throw ValidationError("covariate rows do not match n");
  GenotypeMatrix copy = *this;
  copy.covariates_ = std::move(covariates);
  return copy;
}

GenotypeMatrix GenotypeMatrix::without_phenotype() const {
  GenotypeMatrix copy = *this;
  copy.phenotype_.reset();
  copy.finalize_phenotype();
  return copy;
}

GenotypeMatrix GenotypeMatrix::select_snps(std::span<const std::size_t> indices) const {
  const std::size_t row_bytes = bytes_per_snp();
  std::vector<std::uint8_t> packed;
  packed.reserve(indices.size() * row_bytes);
  std::vector<SnpMeta> snps;
  snps.reserve(indices.size());
  for (std::size_t j : indices) {
    const auto row = packed_row(j);
    packed.insert(packed.end(), row.begin(), row.end());
    snps.push_back(snps_[j]);
  }
  return GenotypeMatrix(n_, std::move(snps), std::move(packed), individuals_, phenotype_, covariates_);
}

GenotypeMatrix GenotypeMatrix::select_individuals(std::span<const std::size_t> indices) const {
  const std::size_t n = indices.size();
  const std::size_t row_bytes = (n + 3) / 4;
  std::vector<std::uint8_t> packed(snps_.size() * row_bytes, 0);
  for (std::size_t j = 0; j < snps_.size(); ++j) {
    const auto row = packed_row(j);
    auto* out = packed.data() + j * row_bytes;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = indices[t];
      const unsigned c = (row[i >> 2] >> (2 * (i & 3))) & 3u;
      out[t >> 2] |= static_cast<std::uint8_t>(c << (2 * (t & 3)));
    }
  }
  std::vector<Individual> people;
  people.reserve(n);
  for (std::size_t i : indices) people.push_back(individuals_.at(i));
  std::optional<PhenotypeLabels> phenotype;
  if (phenotype_) {
    phenotype.emplace();
    for (std::size_t i : indices) phenotype->push_back((*phenotype_)[i]);
  }
  std::optional<Eigen::MatrixXd> covariates;
  if (covariates_) {
    covariates.emplace(n, covariates_->cols());
    for (std::size_t t = 0; t < n; ++t) covariates->row(t) = covariates_->row(indices[t]);
  }
  return GenotypeMatrix(n, snps_, std::move(packed), std::move(people), std::move(phenotype), std::move(covariates));
}

GenotypeMatrix GenotypeMatrix::drop_missing_phenotype() const {
  const auto& labels = phenotype();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n_; ++i) {
    if (labels[i] != -1) keep.push_back(i);
  }
  if (keep.size() == n_) return *this;
  return select_individuals(keep);
}

std::optional<std::size_t> GenotypeMatrix::find_snp(const std::string& snp_id) const {
  for (std::size_t j = 0; j < snps_.size(); ++j) {
    if (snps_[j].snp_id == snp_id) return j;
  }
  return std::nullopt;
}

bool operator==(const GenotypeMatrix& a, const GenotypeMatrix& b) {
  if (a.n_ != b.n_ || a.snps_.size() != b.snps_.size()) return false;
  if (!std::ranges::equal(a.packed_data(), b.packed_data())) return false;
  for (std::size_t j = 0; j < a.snps_.size(); ++j) {
    const auto& x = a.snps_[j];
    const auto& y = b.snps_[j];
    if (x.snp_id != y.snp_id || x.chromosome != y.chromosome || x.position_bp != y.position_bp ||
        x.allele_a != y.allele_a || x.allele_b != y.allele_b) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.n_; ++i) {
    const auto& x = a.individuals_[i];
    const auto& y = b.individuals_[i];
    if (x.family_id != y.family_id || x.individual_id != y.individual_id || x.sex != y.sex) return false;
  }
  return a.phenotype_ == b.phenotype_;
}

std::vector<double> genotype_column(const GenotypeMatrix& matrix, std::size_t j) {
  std::vector<double> out(matrix.n_individuals());
  genotype_column(matrix, j, out);
  return out;
}

void genotype_column(const GenotypeMatrix& matrix, std::size_t j, std::span<double> out) {
  if (matrix.non_missing_count(j) == 0) {
    throw ValidationError("SNP " + matrix.snp(j).snp_id + " has no observed genotypes to impute from");
  }
  kernels::decode(matrix.packed_row(j), matrix.imputed_lut(j), out);
}

namespace {

// Centers and scales to unit norm; nullopt for a constant column.
std::optional<std::vector<double>> standardize(const GenotypeMatrix& matrix, std::size_t j) {
  if (matrix.non_missing_count(j) == 0) return std::nullopt;
  auto x = genotype_column(matrix, j);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  const double norm_sq = kernels::dot(x, x);
  if (!(norm_sq > 1e-12 * static_cast<double>(x.size()))) return std::nullopt;
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (double& v : x) v *= scale;
  return x;
}

}  // namespace

std::optional<double> correlation(const GenotypeMatrix& matrix, std::size_t j, std::size_t k) {
  const auto a = standardize(matrix, j);
  if (!a) return std::nullopt;
  if (j == k) return 1.0;
  const auto b = standardize(matrix, k);
  if (!b) return std::nullopt;
  return std::clamp(kernels::dot(*a, *b), -1.0, 1.0);
}

const std::vector<double>* CorrelationCache::standardized(std::size_t j) {
  if (columns_.empty()) {
    columns_.resize(matrix_.n_snps());
    constant_.assign(matrix_.n_snps(), false);
  }
  if (constant_[j]) return nullptr;
  if (!columns_[j]) {
    auto col = standardize(matrix_, j);
    if (!col) {
      constant_[j] = true;
      return nullptr;
    }
    columns_[j] = std::move(col);
  }
  return &*columns_[j];
}

std::optional<double> CorrelationCache::operator()(std::size_t j, std::size_t k) {
  const auto* a = standardized(j);
  if (!a) return std::nullopt;
  if (j == k) return 1.0;
  const auto* b = standardized(k);
  if (!b) return std::nullopt;
  return std::clamp(kernels::dot(*a, *b), -1.0, 1.0);
}

}  // namespace gwas
