#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gwas/genotype.hpp"
#include "gwas/simulation.hpp"

namespace gwas {

// Groups of detections whose pairwise |r| all exceed threshold_c.
struct ClusterSet {
  std::vector<std::vector<std::size_t>> clusters;
  double threshold_c = 0.3;
};

struct TruePositiveMatch {
  std::size_t true_positives = 0;
  std::vector<std::size_t> false_positives;  // detections hitting no causal SNP
  // hit_causal[t] = causal SNP assigned to detection t (map order), or npos.
  std::vector<std::size_t> assigned_causal;
};

struct EvalReport {
  std::size_t true_positives = 0;
  double fp = 0.0;  // raw false detections or false-positive clusters
  double power = 0.0;
  double fdr = 0.0;
  double misclassifications = 0.0;
  std::size_t size = 0;  // detections before clustering
  std::size_t k_causal = 0;
  double threshold_c = 0.3;
};

struct EvalSummary {
  std::size_t replicates = 0;
  double size = 0.0, power = 0.0, fp = 0.0, fdr = 0.0, misclassifications = 0.0;
  double size_se = 0.0, power_se = 0.0, fp_se = 0.0, fdr_se = 0.0, misclassifications_se = 0.0;
};

// Detections are SNP indices into `matrix`. Correlations with |r| undefined
// (constant columns) count as zero.
ClusterSet c_cluster(const GenotypeMatrix& matrix, std::vector<std::size_t> detections, double threshold_c);

TruePositiveMatch match_true_positives(const GenotypeMatrix& matrix, std::vector<std::size_t> detections,
                                       const std::vector<std::size_t>& causal, double threshold_c);

// `matrix` is the full pre-removal matrix. cluster_fp counts false-positive
// C-clusters instead of raw false detections.
EvalReport evaluate_replicate(const GenotypeMatrix& matrix, const std::vector<std::size_t>& detections,
                              const Scenario& scenario, double threshold_c, bool cluster_fp);

// Per-field means with standard errors; FDR is the mean of per-replicate ratios.
EvalSummary aggregate(const std::vector<EvalReport>& reports);

}  // namespace gwas
