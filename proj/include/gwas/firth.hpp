#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "gwas/genotype.hpp"

namespace gwas {

// Model columns: intercept, then covariates (when requested and present), then
// the SNPs in the listed order.
struct DesignSpec {
  std::vector<std::size_t> snp_indices;
  bool include_covariates = true;
};

struct FitOptions {
  double tolerance = 1e-6;  // on max |modified score| and max |Newton step|
  int max_iter = 50;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  double penalized_loglik = 0.0;    // loglik + 0.5 * log|I(theta)|
  double unpenalized_loglik = 0.0;
  double fisher_logdet = 0.0;
  int iterations = 0;
  bool converged = false;
};

std::size_t design_width(const GenotypeMatrix& matrix, const DesignSpec& design);
Eigen::MatrixXd build_design(const GenotypeMatrix& matrix, const DesignSpec& design);

// Throws RankError naming the first column that is (numerically) a linear
// combination of the columns before it.
void check_full_rank(const Eigen::MatrixXd& x);

// Firth-penalized logistic regression on an explicit design. `start`, when
// given, must have x.cols() entries. Does not check rank; see fit_firth.
FitResult fit_firth_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitOptions& options = {},
                          const Eigen::VectorXd* start = nullptr);

FitResult fit_firth(const GenotypeMatrix& matrix, const DesignSpec& design, const FitOptions& options = {},
                    const Eigen::VectorXd* start = nullptr);

// Penalized log-likelihood of the intercept-only (plus covariates) model.
double null_model_loglik(const GenotypeMatrix& matrix, const FitOptions& options = {});

// 1-df score statistics for adding one SNP to a fitted design. Construction
// precomputes everything that does not depend on the candidate; statistic()
// is const and safe to call concurrently.
class ScoreTester {
 public:
  ScoreTester(const GenotypeMatrix& matrix, const FitResult& fitted, const DesignSpec& design);
  // nullopt when the candidate is constant or collinear with the design.
  std::optional<double> statistic(std::size_t candidate) const;

 private:
  const GenotypeMatrix& matrix_;
  Eigen::VectorXd residual_;  // y - pi
  Eigen::VectorXd weight_;    // pi (1 - pi)
  Eigen::MatrixXd weighted_design_;
  Eigen::LLT<Eigen::MatrixXd> information_;
};

std::optional<double> score_test(const GenotypeMatrix& matrix, const FitResult& fitted, const DesignSpec& design,
                                 std::size_t candidate);

}  // namespace gwas
