#pragma once

#include <cstddef>
#include <string>

namespace gwas {

// Penalized-likelihood selection criteria of the form
//   -2 log L* + k log(n p^2 / c)  [- 2 log k!  for mbic2]
// mbic2 always uses c = 4; the relaxed family uses a free constant (60 in the
// intermediate search rounds).
struct Criterion {
  enum class Kind { mbic2, mbic_c };
  Kind kind = Kind::mbic2;
  double constant_c = 4.0;

  static Criterion mbic2() { return {Kind::mbic2, 4.0}; }
  static Criterion mbic_relaxed(double c) { return {Kind::mbic_c, c}; }
  static Criterion mbic60() { return mbic_relaxed(60.0); }

  std::string name() const;
  friend bool operator==(const Criterion&, const Criterion&) = default;
};

double evaluate(const Criterion& criterion, double penalized_loglik, long k, double n, double p);
double penalty(const Criterion& criterion, long k, double n, double p);
// Penalty change when the model grows from k to k + 1 SNPs.
double penalty_increment(const Criterion& criterion, long k, double n, double p);

}  // namespace gwas
