#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "gwas/errors.hpp"
#include "gwas/rng.hpp"
#include "gwas/simulation.hpp"

namespace gwas {

GenotypeMatrix synthesize_genotypes(const SyntheticConfig& config) {
  const std::size_t n = config.n_individuals;
  const std::size_t p = config.n_snps;
  if (n == 0 || p == 0 || config.n_chromosomes == 0) throw ArgumentError("synthetic dataset needs n, p, chromosomes > 0");
  if (!(config.maf_low > 0.0 && config.maf_low <= config.maf_high && config.maf_high <= 0.5)) {
    throw ArgumentError("synthetic MAF range must satisfy 0 < low <= high <= 0.5");
  }
  if (!(config.latent_loading >= 0.0 && config.latent_loading < 1.0)) {
    throw ArgumentError("latent loading must lie in [0, 1)");
  }
  Rng rng(config.seed);
  const boost::math::normal standard;
  const double noise_scale = std::sqrt(1.0 - config.latent_loading * config.latent_loading);
  const std::size_t row_bytes = (n + 3) / 4;

  std::vector<SnpMeta> snps(p);
  std::vector<double> threshold(p);
  const std::size_t per_chromosome = p / config.n_chromosomes;
  const std::size_t remainder = p % config.n_chromosomes;
  std::size_t j = 0;
  for (std::size_t c = 0; c < config.n_chromosomes; ++c) {
    const std::size_t count = per_chromosome + (c < remainder ? 1 : 0);
    for (std::size_t t = 0; t < count; ++t, ++j) {
      auto& snp = snps[j];
      snp.snp_id = "snp" + std::to_string(j + 1);
      snp.chromosome = static_cast<int>(c + 1);
      snp.position_bp = 1000 * static_cast<std::int64_t>(t + 1);
      snp.position_cm = 0.0;
      snp.allele_a = "A";
      snp.allele_b = "G";
      const double maf = config.maf_low + (config.maf_high - config.maf_low) * rng.uniform();
      threshold[j] = boost::math::quantile(standard, 1.0 - maf);
    }
  }

  std::vector<std::uint8_t> packed(p * row_bytes, 0);
  std::vector<double> latent(2 * n);
  std::size_t block_start = 0;
  while (block_start < p) {
    // Blocks never cross chromosome boundaries.
    std::size_t block_end = std::min(p, block_start + rng.geometric_at_least_one(config.mean_block_size));
    for (std::size_t t = block_start + 1; t < block_end; ++t) {
      if (snps[t].chromosome != snps[block_start].chromosome) {
        block_end = t;
        break;
      }
    }
    for (double& h : latent) h = rng.normal();
    for (std::size_t s = block_start; s < block_end; ++s) {
      std::uint8_t* row = packed.data() + s * row_bytes;
      for (std::size_t i = 0; i < n; ++i) {
        int minor = 0;
        for (int hap = 0; hap < 2; ++hap) {
          const double liability = config.latent_loading * latent[2 * i + hap] + noise_scale * rng.normal();
          minor += liability > threshold[s] ? 1 : 0;
        }
        // allele_a is the simulated minor allele: count 2 -> 00, 1 -> 10, 0 -> 11.
        const std::uint8_t code = minor == 2 ? 0u : (minor == 1 ? 2u : 3u);
        row[i >> 2] |= static_cast<std::uint8_t>(code << (2 * (i & 3)));
      }
    }
    block_start = block_end;
  }

  std::vector<Individual> people(n);
  for (std::size_t i = 0; i < n; ++i) {
    people[i].family_id = "F" + std::to_string(i + 1);
    people[i].individual_id = "I" + std::to_string(i + 1);
  }
  return GenotypeMatrix(n, std::move(snps), std::move(packed), std::move(people));
}

}  // namespace gwas
