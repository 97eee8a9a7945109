#include "gwas/criteria.hpp"

#include <cmath>
#include <sstream>

#include "gwas/errors.hpp"

namespace gwas {

namespace {

void validate(const Criterion& criterion, long k, double n, double p) {
  if (k < 0) throw ArgumentError("model size must be non-negative");
  if (!(n >= 1.0) || !(p >= 1.0)) throw ArgumentError("n and p must be at least 1");
  if (!(criterion.constant_c > 0.0)) throw ArgumentError("criterion constant must be positive");
}

// log(n p^2 / c) assembled from logs so huge p does not lose precision.
double log_scale(const Criterion& criterion, double n, double p) {
  return std::log(n) + 2.0 * std::log(p) - std::log(criterion.constant_c);
}

}  // namespace

std::string Criterion::name() const {
  if (kind == Kind::mbic2) return "mBIC2";
  std::ostringstream out;
  out << "mBIC_" << constant_c;
  return out.str();
}

double penalty(const Criterion& criterion, long k, double n, double p) {
  validate(criterion, k, n, p);
  const double kd = static_cast<double>(k);
  double value = kd * log_scale(criterion, n, p);
  if (criterion.kind == Criterion::Kind::mbic2) value -= 2.0 * std::lgamma(kd + 1.0);
  return value;
}

double evaluate(const Criterion& criterion, double penalized_loglik, long k, double n, double p) {
  return -2.0 * penalized_loglik + penalty(criterion, k, n, p);
}

double penalty_increment(const Criterion& criterion, long k, double n, double p) {
  validate(criterion, k, n, p);
  double value = log_scale(criterion, n, p);
  if (criterion.kind == Criterion::Kind::mbic2) value -= 2.0 * std::log(static_cast<double>(k) + 1.0);
  return value;
}

}  // namespace gwas
