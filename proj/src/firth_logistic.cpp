#include <algorithm>
#include <cmath>
#include <string>

#include "gwas/errors.hpp"
#include "gwas/firth.hpp"
#include "gwas/kernels.hpp"

namespace gwas {

namespace {

constexpr double kRankTolerance = 1e-9;
constexpr double kMaxStep = 5.0;
constexpr int kMaxHalvings = 40;
// Likelihood comparisons inside this relative band are rounding noise.
constexpr double kAscentSlack = 1e-12;
constexpr int kPolishSteps = 8;
constexpr double kPolishStep = 1e-11;
// Weights are floored so that the information stays positive definite when
// a linear predictor runs far into the tails.
constexpr double kMinWeight = 1e-300;

struct Evaluation {
  Eigen::VectorXd eta;
  Eigen::VectorXd prob;
  Eigen::VectorXd weight;
  Eigen::VectorXd modified_score;
  Eigen::LLT<Eigen::MatrixXd> information;
  double loglik = 0.0;
  double logdet = 0.0;
  double penalized() const { return loglik + 0.5 * logdet; }
};

std::span<const double> column(const Eigen::MatrixXd& x, Eigen::Index c) {
  return {x.col(c).data(), static_cast<std::size_t>(x.rows())};
}

bool evaluate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, Evaluation& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  out.eta.noalias() = x * beta;
  // One exponential serves both the probability and log(1 + e^t).
  const Eigen::ArrayXd t = out.eta.array();
  const Eigen::ArrayXd e = (-t.abs()).exp();
  const Eigen::ArrayXd inv = (1.0 + e).inverse();
  out.prob = (t >= 0.0).select(inv, e * inv).matrix();
  out.weight = (out.prob.array() * (1.0 - out.prob.array())).max(kMinWeight).matrix();
  // y log p + (1 - y) log(1 - p) = y t - log(1 + e^t)
  const double loglik = (y.array() * t - t.max(0.0) - (1.0 + e).log()).sum();
  // q is small, so the information is assembled from weighted column products.
  const std::span<const double> w(out.weight.data(), static_cast<std::size_t>(n));
  Eigen::MatrixXd info(q, q);
  for (Eigen::Index c = 0; c < q; ++c) {
    for (Eigen::Index r = c; r < q; ++r) info(r, c) = kernels::weighted_dot(column(x, r), w, column(x, c));
  }
  out.information.compute(info);
  if (out.information.info() != Eigen::Success) return false;
  double logdet = 0.0;
  for (Eigen::Index r = 0; r < q; ++r) {
    const double d = out.information.matrixLLT()(r, r);
    if (!(d > 0.0)) return false;
    logdet += 2.0 * std::log(d);
  }
  out.loglik = loglik;
  out.logdet = logdet;
  return true;
}

void add_modified_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Evaluation& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  // Hat diagonal h_i = w_i |L^{-1} x_i|^2; Z = X L^{-T} by forward substitution over columns.
  const Eigen::MatrixXd& l = out.information.matrixLLT();
  Eigen::MatrixXd z(n, q);
  Eigen::VectorXd quad = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < q; ++r) {
    z.col(r) = x.col(r);
    for (Eigen::Index c = 0; c < r; ++c) z.col(r) -= l(r, c) * z.col(c);
    z.col(r) /= l(r, r);
    quad += z.col(r).cwiseAbs2();
  }
  Eigen::VectorXd adjusted(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = out.weight[i] * quad[i];
    adjusted[i] = y[i] - out.prob[i] + h * (0.5 - out.prob[i]);
  }
  const std::span<const double> a(adjusted.data(), static_cast<std::size_t>(n));
  out.modified_score.resize(q);
  for (Eigen::Index c = 0; c < q; ++c) out.modified_score[c] = kernels::dot(column(x, c), a);
}

void require_two_classes(const Eigen::VectorXd& y) {
  const double cases = y.sum();
  if (cases <= 0.0 || cases >= static_cast<double>(y.size())) {
    throw DegenerateResponseError("phenotype has only one class; logistic fit is undefined");
  }
}

// Once converged, a few more steps drive the remaining linear-rate error in
// the coefficients down to rounding level; the score is already within tolerance.
void polish(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::VectorXd& beta, Evaluation& current,
            Evaluation& trial) {
  for (int extra = 0; extra < kPolishSteps; ++extra) {
    const Eigen::VectorXd step = current.information.solve(current.modified_score);
    if (step.cwiseAbs().maxCoeff() <= kPolishStep * std::max(1.0, beta.cwiseAbs().maxCoeff())) return;
    const Eigen::VectorXd candidate = beta + step;
    const double floor = current.penalized() - kAscentSlack * std::max(1.0, std::abs(current.penalized()));
    if (!evaluate(x, y, candidate, trial) || trial.penalized() < floor) return;
    add_modified_score(x, y, trial);
    beta = candidate;
    std::swap(current, trial);
  }
}

}  // namespace

void check_full_rank(const Eigen::MatrixXd& x) {
  const Eigen::Index q = x.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(q, q);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  // Column-by-column Cholesky; a vanishing pivot marks a dependent column.
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    double pivot = gram(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > kRankTolerance * std::max(gram(j, j), 1e-300))) {
      throw RankError(static_cast<std::size_t>(j),
                      "design column " + std::to_string(j) + " is linearly dependent on earlier columns");
    }
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < q; ++i) {
      double s = gram(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
}

FitResult fit_firth_dense(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitOptions& options,
                          const Eigen::VectorXd* start) {
  if (x.rows() != y.size()) throw ArgumentError("design rows do not match response length");
  if (x.rows() < x.cols()) throw ArgumentError("fewer observations than parameters");
  require_two_classes(y);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  if (start) {
    if (start->size() != x.cols()) throw ArgumentError("start vector has the wrong length");
    beta = *start;
  }
  Evaluation current;
  if (!evaluate(x, y, beta, current)) {
    beta.setZero();
    if (!evaluate(x, y, beta, current)) {
      throw RankError(static_cast<std::size_t>(x.cols() - 1), "Fisher information is singular");
    }
  }
  add_modified_score(x, y, current);

  FitResult result;
  Evaluation trial;
  for (int iter = 0;; ++iter) {
    Eigen::VectorXd step = current.information.solve(current.modified_score);
    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > kMaxStep) step *= kMaxStep / largest;
    const bool small_score = current.modified_score.cwiseAbs().maxCoeff() <= options.tolerance;
    if (small_score && step.cwiseAbs().maxCoeff() <= options.tolerance) {
      result.converged = true;
      result.iterations = iter;
      polish(x, y, beta, current, trial);
      break;
    }
    if (iter >= options.max_iter) {
      result.iterations = iter;
      break;
    }
    // Step halving until the penalized likelihood does not decrease.
    bool accepted = false;
    const double floor = current.penalized() - kAscentSlack * std::max(1.0, std::abs(current.penalized()));
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      const Eigen::VectorXd candidate = beta + step;
      if (evaluate(x, y, candidate, trial) && trial.penalized() >= floor) {
        add_modified_score(x, y, trial);
        beta = candidate;
        std::swap(current, trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent left at machine precision: converged when the Newton step is.
      result.iterations = iter;
      result.converged = small_score || largest <= options.tolerance;
      break;
    }
  }
  result.coefficients = beta;
  result.unpenalized_loglik = current.loglik;
  result.fisher_logdet = current.logdet;
  result.penalized_loglik = current.penalized();
  return result;
}

std::size_t design_width(const GenotypeMatrix& matrix, const DesignSpec& design) {
  return 1 + (design.include_covariates ? matrix.n_covariates() : 0) + design.snp_indices.size();
}

Eigen::MatrixXd build_design(const GenotypeMatrix& matrix, const DesignSpec& design) {
  const auto n = static_cast<Eigen::Index>(matrix.n_individuals());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(design_width(matrix, design)));
  x.col(0).setOnes();
  Eigen::Index col = 1;
  if (design.include_covariates && matrix.has_covariates()) {
    const auto& cov = matrix.covariates();
    x.middleCols(col, cov.cols()) = cov;
    col += cov.cols();
  }
  for (std::size_t j : design.snp_indices) {
    genotype_column(matrix, j, std::span<double>(x.col(col).data(), static_cast<std::size_t>(n)));
    ++col;
  }
  return x;
}

FitResult fit_firth(const GenotypeMatrix& matrix, const DesignSpec& design, const FitOptions& options,
                    const Eigen::VectorXd* start) {
  const auto& response = matrix.response();
  const Eigen::Map<const Eigen::VectorXd> y(response.data(), static_cast<Eigen::Index>(response.size()));
  require_two_classes(y);
  const Eigen::MatrixXd x = build_design(matrix, design);
  try {
    check_full_rank(x);
  } catch (const RankError& e) {
    const std::size_t first_snp_col = design_width(matrix, design) - design.snp_indices.size();
    if (e.column() >= first_snp_col) {
      const auto& snp = matrix.snp(design.snp_indices[e.column() - first_snp_col]);
      throw RankError(e.column(), "design column " + std::to_string(e.column()) + " (SNP " + snp.snp_id +
                                      ") is linearly dependent on earlier columns");
    }
    throw;
  }
  return fit_firth_dense(x, y, options, start);
}

double null_model_loglik(const GenotypeMatrix& matrix, const FitOptions& options) {
  return fit_firth(matrix, DesignSpec{}, options).penalized_loglik;
}

ScoreTester::ScoreTester(const GenotypeMatrix& matrix, const FitResult& fitted, const DesignSpec& design)
    : matrix_(matrix) {
  const Eigen::MatrixXd x = build_design(matrix, design);
  if (fitted.coefficients.size() != x.cols()) throw ArgumentError("fit does not match design");
  const auto& response = matrix.response();
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd eta = x * fitted.coefficients;
  residual_.resize(n);
  weight_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta[i]));
    residual_[i] = response[static_cast<std::size_t>(i)] - p;
    weight_[i] = p * (1.0 - p);
  }
  weighted_design_ = weight_.asDiagonal() * x;
  information_.compute(x.transpose() * weighted_design_);
  if (information_.info() != Eigen::Success) throw RankError(static_cast<std::size_t>(x.cols() - 1), "singular information");
}

std::optional<double> ScoreTester::statistic(std::size_t candidate) const {
  if (matrix_.non_missing_count(candidate) == 0) return std::nullopt;
  const std::size_t n = matrix_.n_individuals();
  thread_local std::vector<double> column;
  column.resize(n);
  genotype_column(matrix_, candidate, column);
  const std::span<const double> xs(column);
  const double u = kernels::dot(xs, std::span<const double>(residual_.data(), n));
  const double self = kernels::weighted_dot(xs, std::span<const double>(weight_.data(), n), xs);
  Eigen::VectorXd cross(weighted_design_.cols());
  for (Eigen::Index r = 0; r < weighted_design_.cols(); ++r) {
    cross[r] = kernels::dot(xs, std::span<const double>(weighted_design_.col(r).data(), n));
  }
  const double variance = self - cross.dot(information_.solve(cross));
  if (!(variance > 1e-10 * std::max(self, 1e-300))) return std::nullopt;
  return u * u / variance;
}

std::optional<double> score_test(const GenotypeMatrix& matrix, const FitResult& fitted, const DesignSpec& design,
                                 std::size_t candidate) {
  return ScoreTester(matrix, fitted, design).statistic(candidate);
}

}  // namespace gwas
