#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "gwas/criteria.hpp"
#include "gwas/errors.hpp"

using namespace gwas;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

Big log_factorial(long k) {
  Big sum = 0;
  for (long i = 2; i <= k; ++i) sum += boost::multiprecision::log(Big(i));
  return sum;
}

double reference_penalty(bool mbic2, double c, long k, double n, double p) {
  Big value = Big(k) * boost::multiprecision::log(Big(n) * Big(p) * Big(p) / Big(c));
  if (mbic2) value -= 2 * log_factorial(k);
  return value.convert_to<double>();
}

}  // namespace

TEST_CASE("zero-size models carry no penalty") {
  for (const auto& c : {Criterion::mbic2(), Criterion::mbic60()}) {
    CHECK(evaluate(c, -123.25, 0, 1000, 1e4) == 246.5);
    CHECK(penalty(c, 0, 4077, 149478) == 0.0);
  }
}

TEST_CASE("mBIC2 penalty at the real-data scale") {
  // 2 ln(4077 * 149478^2 / 4) - 2 ln 2, evaluated at 50 digits.
  CHECK(penalty(Criterion::mbic2(), 2, 4077, 149478) == doctest::Approx(60.12696833745308).epsilon(1e-14));
  CHECK(evaluate(Criterion::mbic2(), 0.0, 2, 4077, 149478) == penalty(Criterion::mbic2(), 2, 4077, 149478));
}

TEST_CASE("criteria match a 50-digit reference") {
  for (const auto& [n, p] : {std::pair{1e3, 1e4}, std::pair{4077.0, 149478.0}}) {
    for (long k = 0; k <= 50; ++k) {
      CHECK(penalty(Criterion::mbic2(), k, n, p) == doctest::Approx(reference_penalty(true, 4, k, n, p)).epsilon(1e-13));
      CHECK(penalty(Criterion::mbic60(), k, n, p) ==
            doctest::Approx(reference_penalty(false, 60, k, n, p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("mBIC2 minus mBIC60 is k ln 15 - 2 ln k!") {
  for (long k = 0; k <= 20; ++k) {
    const double diff = evaluate(Criterion::mbic2(), -500.0, k, 1000, 1e4) - evaluate(Criterion::mbic60(), -500.0, k, 1000, 1e4);
    const double expected = (Big(k) * boost::multiprecision::log(Big(15)) - 2 * log_factorial(k)).convert_to<double>();
    CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::log(15.0) == doctest::Approx(2.708050201102210).epsilon(1e-15));
}

TEST_CASE("penalty increments") {
  const double n = 1000, p = 1e4;
  CHECK(penalty_increment(Criterion::mbic2(), 0, n, p) == doctest::Approx(std::log(n * p * p / 4)).epsilon(1e-15));
  // ln(2.5e10) - 2 ln 5 at 50 digits.
  CHECK(penalty_increment(Criterion::mbic2(), 4, n, p) == doctest::Approx(20.72326583694641).epsilon(1e-13));
  for (long k = 0; k <= 100; ++k) {
    for (const auto& c : {Criterion::mbic2(), Criterion::mbic60(), Criterion::mbic_relaxed(7.5)}) {
      const double step = evaluate(c, -42.0, k + 1, n, p) - evaluate(c, -42.0, k, n, p);
      CHECK(std::abs(step - penalty_increment(c, k, n, p)) < 1e-12 * std::max(1.0, std::abs(step)) + 1e-11);
    }
    CHECK(penalty_increment(Criterion::mbic60(), k, n, p) == penalty_increment(Criterion::mbic60(), 0, n, p));
  }
}

TEST_CASE("mBIC2 penalty grows while (k+1)^2 < n p^2 / 4") {
  const double n = 1000, p = 1e4;
  for (long k = 0; k < 1000; ++k) CHECK(penalty(Criterion::mbic2(), k + 1, n, p) > penalty(Criterion::mbic2(), k, n, p));
}

TEST_CASE("criterion arguments are validated") {
  CHECK_THROWS_AS(evaluate(Criterion::mbic2(), 0.0, -1, 10, 10), ArgumentError);
  CHECK_THROWS_AS(penalty_increment(Criterion::mbic60(), -2, 10, 10), ArgumentError);
  CHECK(Criterion::mbic2().name() == "mBIC2");
  CHECK(Criterion::mbic60().name() == "mBIC_60");
}
