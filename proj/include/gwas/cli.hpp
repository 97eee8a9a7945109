#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gwas::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kSize = 5,
  kValidation = 6,
  kInfeasible = 7,
  kDegenerate = 8,
  kNumerical = 9,
  kEmptyResult = 10,
};

struct RunConfig {
  std::string subcommand;
  std::string bfile;
  std::string out;
  std::string pheno;      // optional .fam-style phenotype override
  std::string covar;      // optional covariate table
  std::string sim_dir;    // replicate directories from simulate-*
  std::string results;    // select outputs for evaluate (defaults to sim_dir)
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t m1 = 350;
  std::size_t m2 = 5000;
  std::size_t d = 50;
  double cluster_c = 0.3;
  double maf_min = 0.01;
  double hwe_alpha = 1e-4;
  double bh_alpha = 0.05;
  std::size_t replicates = 200;
  std::size_t k_causal = 6;
  double effect_low = 0.2;
  double effect_high = 0.28;
  double causal_maf = 0.3;
  double rho_max = 0.1;
  bool remove_half = true;
  bool skip_qc = false;
  std::string isa = "auto";
  // synth
  std::size_t n_individuals = 1000;
  std::size_t n_snps = 10000;
  std::size_t n_chromosomes = 6;
  double latent_loading = 0.975;
};

// Parses argv into a config; returns kOk, or an exit code after printing usage.
int parse_args(int argc, char** argv, RunConfig& config);

int run(const RunConfig& config);

int main(int argc, char** argv);

}  // namespace gwas::cli
