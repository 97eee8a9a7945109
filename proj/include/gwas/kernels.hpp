#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the CPU supports it, a vectorized variant. The active table is chosen
// once at startup from CPU features and can be overridden (tests, --isa).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace gwas::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Genotype tallies indexed by the raw 2-bit PLINK code (0 = hom A1,
// 1 = missing, 2 = het, 3 = hom A2).
struct CodeCounts {
  std::array<std::uint32_t, 4> all{};
  std::array<std::uint32_t, 4> cases{};
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*weighted_dot)(const double* a, const double* w, const double* b, std::size_t n);
  // out[i] = lut[code_i] for the first n genotypes of a packed SNP row.
  void (*decode)(const std::uint8_t* packed, std::size_t n, const double* lut, double* out);
  // case_mask uses the packed layout with 0b11 in every case slot.
  CodeCounts (*count_codes)(const std::uint8_t* packed, const std::uint8_t* case_mask, std::size_t n);
};

bool isa_available(Isa isa);
const KernelTable& table(Isa isa);
const KernelTable& active();
Isa active_isa();
// Throws ArgumentError if the ISA is not available on this CPU.
void force_isa(Isa isa);
void reset_isa();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> a, std::span<const double> w, std::span<const double> b) {
  return active().weighted_dot(a.data(), w.data(), b.data(), a.size());
}

inline void decode(std::span<const std::uint8_t> packed, const std::array<double, 4>& lut, std::span<double> out) {
  active().decode(packed.data(), out.size(), lut.data(), out.data());
}

inline CodeCounts count_codes(std::span<const std::uint8_t> packed, std::span<const std::uint8_t> case_mask,
                              std::size_t n) {
  return active().count_codes(packed.data(), case_mask.data(), n);
}

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* a, const double* w, const double* b, std::size_t n);
void decode(const std::uint8_t* packed, std::size_t n, const double* lut, double* out);
CodeCounts count_codes(const std::uint8_t* packed, const std::uint8_t* case_mask, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double weighted_dot(const double* a, const double* w, const double* b, std::size_t n);
void decode(const std::uint8_t* packed, std::size_t n, const double* lut, double* out);
CodeCounts count_codes(const std::uint8_t* packed, const std::uint8_t* case_mask, std::size_t n);
}  // namespace avx2

}  // namespace gwas::kernels
