#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gwas/genotype.hpp"
#include "gwas/rng.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("gwas_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

// Hardy-Weinberg genotype draw with allele frequency f.
inline int draw_genotype(gwas::Rng& rng, double f) { return (rng.uniform() < f) + (rng.uniform() < f); }

inline std::vector<std::vector<int>> random_counts(std::size_t n, std::size_t p, gwas::Rng& rng,
                                                   double missing_rate = 0.0, double maf_low = 0.1,
                                                   double maf_high = 0.5) {
  std::vector<std::vector<int>> columns(p, std::vector<int>(n));
  for (auto& column : columns) {
    const double f = maf_low + (maf_high - maf_low) * rng.uniform();
    for (auto& g : column) g = rng.uniform() < missing_rate ? -1 : draw_genotype(rng, f);
  }
  return columns;
}

inline gwas::PhenotypeLabels random_labels(std::size_t n, gwas::Rng& rng) {
  gwas::PhenotypeLabels labels(n);
  for (auto& y : labels) y = static_cast<std::int8_t>(rng.bernoulli(0.5));
  // Both classes present.
  labels[0] = 1;
  labels[1] = 0;
  return labels;
}

// Same genotypes with the given chromosome per SNP; positions restart on each chromosome.
inline gwas::GenotypeMatrix with_chromosomes(const gwas::GenotypeMatrix& m, const std::vector<int>& chromosome) {
  auto snps = m.snps();
  std::int64_t pos = 0;
  for (std::size_t j = 0; j < snps.size(); ++j) {
    if (j > 0 && chromosome[j] != chromosome[j - 1]) pos = 0;
    snps[j].chromosome = chromosome[j];
    snps[j].position_bp = (pos += 1000);
  }
  const auto packed = m.packed_data();
  std::optional<gwas::PhenotypeLabels> phenotype;
  if (m.has_phenotype()) phenotype = m.phenotype();
  return gwas::GenotypeMatrix(m.n_individuals(), std::move(snps),
                              std::vector<std::uint8_t>(packed.begin(), packed.end()), m.individuals(), phenotype);
}

// Independent SNPs with logistic effects on the listed columns; the intercept
// centres the case fraction near one half.
inline gwas::GenotypeMatrix planted_instance(std::uint64_t seed, std::size_t n, std::size_t p,
                                             const std::vector<std::size_t>& causal, const std::vector<double>& beta,
                                             double maf_low = 0.2, double maf_high = 0.5) {
  gwas::Rng rng(seed);
  auto columns = random_counts(n, p, rng, 0.0, maf_low, maf_high);
  const auto genotypes = gwas::GenotypeMatrix::from_counts(columns);
  std::vector<double> eta(n, 0.0);
  for (std::size_t c = 0; c < causal.size(); ++c) {
    const auto x = gwas::genotype_column(genotypes, causal[c]);
    double mean = 0.0;
    for (double v : x) mean += v / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) eta[i] += beta[c] * (x[i] - mean);
  }
  gwas::PhenotypeLabels labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta[i])) ? 1 : 0;
  return genotypes.with_phenotype(std::move(labels));
}

}  // namespace testing
