#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gwas/errors.hpp"
#include "gwas/simulation.hpp"
#include "support.hpp"

using namespace gwas;

namespace {

const GenotypeMatrix& synthetic() {
  static const GenotypeMatrix m = [] {
    SyntheticConfig config;
    config.n_individuals = 1000;
    config.n_snps = 3000;
    config.seed = 17;
    return synthesize_genotypes(config);
  }();
  return m;
}

double case_fraction(const PhenotypeLabels& y) {
  return static_cast<double>(std::ranges::count(y, 1)) / static_cast<double>(y.size());
}

double label_correlation(const GenotypeMatrix& m, const PhenotypeLabels& y, std::size_t j) {
  const auto x = genotype_column(m, j);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("rng reference values") {
  Rng rng(5489);
  CHECK(rng.next_u64() == 14514284786278117030ULL);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  Rng a(3);
  for (int t = 0; t < 1000; ++t) {
    const double u = a.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(a.below(7) < 7);
  }
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  a.shuffle(v.begin(), v.end());
  std::vector<int> sorted = v;
  std::ranges::sort(sorted);
  for (int t = 0; t < 20; ++t) CHECK(sorted[t] == t);
}

TEST_CASE("null phenotypes are reproducible and balanced") {
  const auto& m = synthetic();
  CHECK(simulate_null(m, 99) == simulate_null(m, 99));
  CHECK(simulate_null(m, 99) != simulate_null(m, 100));
  double total = 0.0;
  for (std::uint64_t r = 0; r < 200; ++r) total += case_fraction(simulate_null(m, derive_seed(5, r)));
  CHECK(std::abs(total / 200.0 - 0.5) < 0.02);
}

TEST_CASE("null phenotypes are uncorrelated with genotypes") {
  const auto& m = synthetic();
  const auto y = simulate_null(m, 123);
  double sum = 0.0;
  for (std::size_t j = 0; j < 500; ++j) sum += std::abs(label_correlation(m, y, j));
  CHECK(sum / 500.0 < 3.0 / std::sqrt(1000.0));
}

TEST_CASE("causal SNPs spread over chromosomes and satisfy constraints") {
  const auto& m = synthetic();
  const auto causal = pick_causal(m, 6, 0.3, 0.1, 8);
  REQUIRE(causal.size() == 6);
  std::set<int> chromosomes;
  for (std::size_t j : causal) {
    chromosomes.insert(m.snp(j).chromosome);
    CHECK(m.snp(j).minor_allele_freq > 0.3);
  }
  CHECK(chromosomes.size() == 6);
  for (std::size_t a = 0; a < causal.size(); ++a) {
    for (std::size_t b = a + 1; b < causal.size(); ++b) CHECK(std::abs(*correlation(m, causal[a], causal[b])) < 0.1);
  }
  CHECK(pick_causal(m, 6, 0.3, 0.1, 8) == causal);

  const auto eight = pick_causal(m, 8, 0.3, 0.1, 9);
  std::map<int, int> per;
  for (std::size_t j : eight) ++per[m.snp(j).chromosome];
  for (const auto& [c, count] : per) CHECK((count == 1 || count == 2));
  CHECK(per.size() == 6);

  const auto loose = pick_causal(m, 12, 0.3, 1.0, 10);
  CHECK(loose.size() == 12);
}

TEST_CASE("infeasible causal constraints name the binding constraint") {
  const auto& m = synthetic();
  try {
    pick_causal(m, 6, 0.5, 0.1, 1);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.constraint() == "maf_min");
  }
  try {
    pick_causal(m, 60, 0.3, 1e-6, 1);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.constraint() == "rho_max");
  }
}

TEST_CASE("effect grid") {
  const auto grid = effect_grid(6, 0.2, 0.28);
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == 0.2);
  CHECK(grid.back() == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(grid[1] == doctest::Approx(0.216).epsilon(1e-14));
  CHECK(effect_grid(1, 0.5, 0.9) == std::vector<double>{0.5});
}

TEST_CASE("intercept calibration") {
  const auto& m = synthetic();
  CHECK(calibrate_intercept(m, {5}, {0.0}) == 0.0);
  const std::vector<std::size_t> one{42};
  const double b0 = calibrate_intercept(m, one, {0.25});
  CHECK(std::abs(mean_case_probability(m, one, {0.25}, b0) - 0.5) <= 1e-9);
  const auto x = genotype_column(m, 42);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  CHECK(std::abs(b0 + 0.25 * mean) < 0.01);
  const auto causal = pick_causal(m, 6, 0.3, 0.1, 8);
  const auto effects = effect_grid(6, 0.2, 0.28);
  CHECK(std::abs(mean_case_probability(m, causal, effects, calibrate_intercept(m, causal, effects)) - 0.5) <= 1e-9);
}

TEST_CASE("logistic risk at the extremes") {
  Rng rng(4);
  const std::size_t n = 2000;
  auto columns = testing::random_counts(n, 1, rng, 0.0, 0.4, 0.4);
  const auto m = GenotypeMatrix::from_counts(columns);
  Scenario s;
  s.kind = Scenario::Kind::complex_trait;
  s.causal_snps = {0};
  s.effects = {10.0};
  s.intercept = -10.0;
  s.seed = 77;
  const auto y = simulate_trait(m, s);
  std::size_t hom = 0, hom_cases = 0, zero = 0, zero_cases = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = m.dosage(i, 0);
    if (*d == 2) {
      ++hom;
      hom_cases += y[i] == 1;
    } else if (*d == 0) {
      ++zero;
      zero_cases += y[i] == 1;
    }
  }
  REQUIRE(hom > 100);
  CHECK(hom_cases >= hom - 2);
  CHECK(zero_cases <= 2);
}

TEST_CASE("trait phenotypes follow the calibrated model") {
  const auto& m = synthetic();
  auto s = make_trait_scenario(m, 6, 0.5, 0.5, 0.3, 0.1, false, 21, 0);
  CHECK(s.kind == Scenario::Kind::complex_trait);
  CHECK(s.effects == std::vector<double>(6, 0.5));
  CHECK(s.removed_causal.empty());
  const auto y = simulate_phenotype(m, s);
  CHECK(y == simulate_phenotype(m, s));
  CHECK(std::abs(case_fraction(y) - 0.5) < 4.0 * std::sqrt(0.25 / 1000.0));
  auto other = s;
  other.replicate_id = 1;
  CHECK(simulate_phenotype(m, other) != y);
  // The causal set depends on the base seed only.
  CHECK(make_trait_scenario(m, 6, 0.5, 0.5, 0.3, 0.1, false, 21, 5).causal_snps == s.causal_snps);
  // Causal SNPs carry signal.
  for (std::size_t j : s.causal_snps) CHECK(label_correlation(m, y, j) > 0.0);

  Scenario zero = s;
  zero.effects.assign(6, 0.0);
  zero.intercept = 0.0;
  CHECK(std::abs(case_fraction(simulate_trait(m, zero)) - 0.5) < 0.07);
}

TEST_CASE("half of the causal SNPs with proxies are removed") {
  const auto& m = synthetic();
  auto s = make_trait_scenario(m, 6, 0.2, 0.28, 0.3, 0.1, true, 21, 0);
  CHECK(s.removed_causal.size() == 3);
  for (std::size_t j : s.removed_causal) {
    CHECK(std::ranges::find(s.causal_snps, j) != s.causal_snps.end());
    double best = 0.0;
    for (std::size_t k = 0; k < m.n_snps(); ++k) {
      if (k == j || m.snp(k).chromosome != m.snp(j).chromosome) continue;
      if (const auto r = correlation(m, j, k)) best = std::max(best, std::abs(*r));
    }
    CHECK(best >= 0.5);
  }
  const auto removal = remove_causal(m, s);
  CHECK(removal.analysis.n_snps() == m.n_snps() - 3);
  CHECK(removal.scenario.causal_snps == s.causal_snps);
  for (std::size_t j : s.removed_causal) CHECK_FALSE(removal.analysis.find_snp(m.snp(j).snp_id).has_value());
  for (std::size_t a = 0; a < removal.kept.size(); ++a) {
    CHECK(removal.analysis.snp(a).snp_id == m.snp(removal.kept[a]).snp_id);
  }
}

TEST_CASE("causal SNPs without proxies are never removed") {
  Rng rng(8);
  const auto m = GenotypeMatrix::from_counts(testing::random_counts(1000, 40, rng, 0.0, 0.35, 0.5));
  Scenario s;
  s.kind = Scenario::Kind::complex_trait;
  s.causal_snps = {3, 10, 20, 30};
  s.effects = {0.2, 0.2, 0.2, 0.2};
  CHECK(choose_removed_causal(m, s) == 2);
  CHECK(s.removed_causal.empty());
  const auto removal = remove_causal(m, s);
  CHECK(removal.analysis.n_snps() == 40);
}

TEST_CASE("scenario files round trip") {
  const auto& m = synthetic();
  const auto s = make_trait_scenario(m, 6, 0.2, 0.28, 0.3, 0.1, true, 21, 4);
  testing::TempDir dir;
  write_scenario(m, s, dir / "scenario.txt");
  const auto back = read_scenario(m, dir / "scenario.txt");
  CHECK(back.kind == s.kind);
  CHECK(back.causal_snps == s.causal_snps);
  CHECK(back.effects == s.effects);
  CHECK(back.intercept == s.intercept);
  CHECK(back.removed_causal == s.removed_causal);
  CHECK(back.seed == s.seed);
  CHECK(back.replicate_id == 4);
  CHECK(back.remove_half);
  CHECK(simulate_phenotype(m, back) == simulate_phenotype(m, s));

  const auto null = make_null_scenario(3, 2);
  write_scenario(m, null, dir / "null.txt");
  const auto null_back = read_scenario(m, dir / "null.txt");
  CHECK(null_back.kind == Scenario::Kind::global_null);
  CHECK(simulate_phenotype(m, null_back) == simulate_phenotype(m, null));

  testing::spit(dir / "bad.txt", "kind=complex_trait\nseed=1\n");
  CHECK_THROWS_AS(read_scenario(m, dir / "bad.txt"), FormatError);
  CHECK_THROWS_AS(read_scenario(m, dir / "missing.txt"), IoError);
}

TEST_CASE("synthetic genotypes have block LD") {
  const auto& m = synthetic();
  CHECK(m.n_individuals() == 1000);
  CHECK(m.n_snps() == 3000);
  CHECK(m.snp(0).chromosome == 1);
  CHECK(m.snp(2999).chromosome == 6);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t j = 0; j + 1 < m.n_snps(); ++j) {
    if (m.snp(j).chromosome != m.snp(j + 1).chromosome) continue;
    if (const auto r = correlation(m, j, j + 1)) {
      sum += std::abs(*r);
      ++pairs;
    }
  }
  const double mean_r = sum / static_cast<double>(pairs);
  CHECK(mean_r > 0.5);
  CHECK(mean_r < 0.7);
  for (std::size_t j = 0; j < m.n_snps(); ++j) CHECK(m.snp(j).minor_allele_freq <= 0.5);

  SyntheticConfig config;
  config.n_individuals = 50;
  config.n_snps = 40;
  config.seed = 2;
  CHECK(synthesize_genotypes(config) == synthesize_genotypes(config));
  config.latent_loading = 1.0;
  CHECK_THROWS_AS(synthesize_genotypes(config), ArgumentError);
}
