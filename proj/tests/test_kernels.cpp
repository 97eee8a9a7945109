#include <doctest.h>

#include <vector>

#include "gwas/kernels.hpp"
#include "gwas/rng.hpp"

using namespace gwas;
namespace k = gwas::kernels;

namespace {

std::vector<double> randoms(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, Rng& rng) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng.below(256));
  return v;
}

// Case masks carry 0b11 per case slot and zeroed padding.
std::vector<std::uint8_t> random_mask(std::size_t n, Rng& rng) {
  std::vector<std::uint8_t> v((n + 3) / 4, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(0.5)) v[i / 4] |= static_cast<std::uint8_t>(3u << (2 * (i % 4)));
  }
  return v;
}

}  // namespace

TEST_CASE("scalar kernels compute the textbook quantities") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6}, w{0.5, 1, 2};
  CHECK(k::scalar::dot(a.data(), b.data(), 3) == 32.0);
  CHECK(k::scalar::weighted_dot(a.data(), w.data(), b.data(), 3) == 2.0 + 10.0 + 36.0);

  // 0b11011000: codes 0, 2, 1, 3 for individuals 1..4.
  const std::uint8_t byte = 0b11011000;
  const double lut[4] = {10, 11, 12, 13};
  double out[4];
  k::scalar::decode(&byte, 4, lut, out);
  CHECK(out[0] == 10);
  CHECK(out[1] == 12);
  CHECK(out[2] == 11);
  CHECK(out[3] == 13);

  const std::uint8_t mask = 0b11000011;  // individuals 1 and 4 are cases
  const auto counts = k::scalar::count_codes(&byte, &mask, 4);
  CHECK(counts.all == std::array<std::uint32_t, 4>{1, 1, 1, 1});
  CHECK(counts.cases == std::array<std::uint32_t, 4>{1, 0, 0, 1});
}

TEST_CASE("scalar kernels ignore padding beyond n") {
  const std::uint8_t byte = 0b11111100;
  const std::uint8_t mask = 0xFF;
  const auto counts = k::scalar::count_codes(&byte, &mask, 1);
  CHECK(counts.all == std::array<std::uint32_t, 4>{1, 0, 0, 0});
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  Rng rng(17);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 33, 64, 127, 128, 129, 130, 131, 1000, 4097}) {
    CAPTURE(n);
    const auto a = randoms(n, rng), b = randoms(n, rng);
    std::vector<double> w(n);
    for (auto& x : w) x = rng.uniform();
    const double d0 = k::scalar::dot(a.data(), b.data(), n);
    const double d1 = k::avx2::dot(a.data(), b.data(), n);
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-12));
    const double w0 = k::scalar::weighted_dot(a.data(), w.data(), b.data(), n);
    const double w1 = k::avx2::weighted_dot(a.data(), w.data(), b.data(), n);
    CHECK(w1 == doctest::Approx(w0).epsilon(1e-12));

    const auto packed = random_bytes((n + 3) / 4, rng);
    const double lut[4] = {0.0, 1.25, 1.0, 2.0};
    std::vector<double> out0(n, -7.0), out1(n, -7.0);
    k::scalar::decode(packed.data(), n, lut, out0.data());
    k::avx2::decode(packed.data(), n, lut, out1.data());
    CHECK(out0 == out1);

    const auto mask = random_mask(n, rng);
    const auto c0 = k::scalar::count_codes(packed.data(), mask.data(), n);
    const auto c1 = k::avx2::count_codes(packed.data(), mask.data(), n);
    CHECK(c0.all == c1.all);
    CHECK(c0.cases == c1.cases);
  }
}

TEST_CASE("isa selection can be forced and reset") {
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  CHECK(k::isa_name(k::active_isa()) == "scalar");
  k::reset_isa();
  if (k::isa_available(k::Isa::avx2)) CHECK(k::active_isa() == k::Isa::avx2);
}
