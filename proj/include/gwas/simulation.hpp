#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gwas/genotype.hpp"

namespace gwas {

struct Scenario {
  enum class Kind { global_null, complex_trait };
  Kind kind = Kind::global_null;
  std::vector<std::size_t> causal_snps;  // indices into the full (pre-removal) matrix
  std::vector<double> effects;           // aligned with causal_snps
  double intercept = 0.0;
  std::vector<std::size_t> removed_causal;
  std::uint64_t seed = 0;  // base seed; phenotype draws use derive_seed(seed, replicate_id)
  std::size_t replicate_id = 0;

  // Generation parameters, archived so a run can be repeated.
  std::size_t k = 0;
  double effect_low = 0.2;
  double effect_high = 0.28;
  double maf_min = 0.3;
  double rho_max = 0.1;
  bool remove_half = true;
};

std::string to_string(Scenario::Kind kind);

// Evenly spaced grid over [low, high] in causal-SNP order.
std::vector<double> effect_grid(std::size_t k, double low, double high);

PhenotypeLabels simulate_null(const GenotypeMatrix& matrix, std::uint64_t seed);

// k SNPs with MAF > maf_min and pairwise |r| < rho_max, spread evenly over
// chromosomes. Throws InfeasibleError naming the binding constraint.
std::vector<std::size_t> pick_causal(const GenotypeMatrix& matrix, std::size_t k, double maf_min, double rho_max,
                                     std::uint64_t seed);

// Mean case probability under the logistic model for a given intercept.
double mean_case_probability(const GenotypeMatrix& matrix, const std::vector<std::size_t>& causal,
                             const std::vector<double>& effects, double intercept);

// Intercept giving a mean case probability of exactly one half.
double calibrate_intercept(const GenotypeMatrix& matrix, const std::vector<std::size_t>& causal,
                           const std::vector<double>& effects);

PhenotypeLabels simulate_trait(const GenotypeMatrix& matrix, const Scenario& scenario);

// Chooses the half of the causal SNPs with the strongest proxies (|r| >= 0.5 to
// another SNP on the same chromosome) and records them in removed_causal.
// Returns the number of causal SNPs that had no qualifying proxy.
std::size_t choose_removed_causal(const GenotypeMatrix& matrix, Scenario& scenario, double proxy_min = 0.5);

struct RemovalResult {
  GenotypeMatrix analysis;
  Scenario scenario;
  std::vector<std::size_t> kept;  // analysis index -> original index
};

RemovalResult remove_causal(const GenotypeMatrix& matrix, const Scenario& scenario);

// Complete complex-trait replicate: pick causal SNPs, assign the effect grid,
// calibrate the intercept, choose removals when requested, and draw labels.
Scenario make_trait_scenario(const GenotypeMatrix& matrix, std::size_t k, double effect_low, double effect_high,
                             double maf_min, double rho_max, bool remove_half, std::uint64_t seed,
                             std::size_t replicate_id);
Scenario make_null_scenario(std::uint64_t seed, std::size_t replicate_id);
PhenotypeLabels simulate_phenotype(const GenotypeMatrix& matrix, const Scenario& scenario);

// Flat key=value text; SNPs are stored by id.
void write_scenario(const GenotypeMatrix& matrix, const Scenario& scenario, const std::filesystem::path& path);
Scenario read_scenario(const GenotypeMatrix& matrix, const std::filesystem::path& path);

struct SyntheticConfig {
  std::size_t n_individuals = 1000;
  std::size_t n_snps = 10000;
  std::size_t n_chromosomes = 6;
  double mean_block_size = 20.0;
  double maf_low = 0.05;
  double maf_high = 0.5;
  // Loading of each SNP on its block's latent haplotype variable.
  double latent_loading = 0.975;
  std::uint64_t seed = 1;
};

// Block-LD genotypes: within a block every haplotype allele is a threshold of
// a shared latent normal plus independent noise.
GenotypeMatrix synthesize_genotypes(const SyntheticConfig& config);

}  // namespace gwas
