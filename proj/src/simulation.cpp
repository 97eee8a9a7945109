#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "gwas/errors.hpp"
#include "gwas/kernels.hpp"
#include "gwas/rng.hpp"
#include "gwas/simulation.hpp"

namespace gwas {

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Linear predictor without the intercept.
std::vector<double> linear_predictor(const GenotypeMatrix& matrix, const std::vector<std::size_t>& causal,
                                     const std::vector<double>& effects) {
  if (causal.size() != effects.size()) throw ArgumentError("effects must align with causal SNPs");
  std::vector<double> eta(matrix.n_individuals(), 0.0);
  std::vector<double> column(matrix.n_individuals());
  for (std::size_t c = 0; c < causal.size(); ++c) {
    if (effects[c] == 0.0) continue;
    genotype_column(matrix, causal[c], column);
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] += effects[c] * column[i];
  }
  return eta;
}

double mean_probability(const std::vector<double>& eta, double intercept) {
  double sum = 0.0;
  for (double v : eta) sum += logistic(intercept + v);
  return sum / static_cast<double>(eta.size());
}

// Centered, unit-norm column; empty for a constant one.
std::vector<double> standardized_column(const GenotypeMatrix& matrix, std::size_t j) {
  auto x = genotype_column(matrix, j);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  const double norm = std::sqrt(kernels::dot(x, x));
  if (!(norm > 1e-9)) return {};
  for (double& v : x) v /= norm;
  return x;
}

std::uint64_t causal_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x5eed0fca05a15ULL); }

}  // namespace

std::string to_string(Scenario::Kind kind) {
  return kind == Scenario::Kind::global_null ? "global_null" : "complex_trait";
}

std::vector<double> effect_grid(std::size_t k, double low, double high) {
  std::vector<double> effects(k);
  for (std::size_t c = 0; c < k; ++c) {
    effects[c] = k == 1 ? low : low + (high - low) * static_cast<double>(c) / static_cast<double>(k - 1);
  }
  return effects;
}

PhenotypeLabels simulate_null(const GenotypeMatrix& matrix, std::uint64_t seed) {
  Rng rng(seed);
  PhenotypeLabels labels(matrix.n_individuals());
  for (auto& label : labels) label = rng.bernoulli(0.5) ? 1 : 0;
  return labels;
}

std::vector<std::size_t> pick_causal(const GenotypeMatrix& matrix, std::size_t k, double maf_min, double rho_max,
                                     std::uint64_t seed) {
  if (k == 0) return {};
  std::map<int, std::vector<std::size_t>> eligible;
  std::vector<int> chromosomes;
  for (std::size_t j = 0; j < matrix.n_snps(); ++j) {
    const auto& snp = matrix.snp(j);
    if (chromosomes.empty() || chromosomes.back() != snp.chromosome) chromosomes.push_back(snp.chromosome);
    if (snp.minor_allele_freq > maf_min && matrix.non_missing_count(j) > 0) eligible[snp.chromosome].push_back(j);
  }
  Rng rng(seed);
  // Chromosomes receiving the k mod C extra SNPs are drawn at random.
  std::vector<int> extra_order = chromosomes;
  rng.shuffle(extra_order.begin(), extra_order.end());
  std::map<int, std::size_t> quota;
  for (int c : chromosomes) quota[c] = k / chromosomes.size();
  for (std::size_t e = 0; e < k % chromosomes.size(); ++e) ++quota[extra_order[e]];
  for (int c : chromosomes) {
    if (eligible[c].size() < quota[c]) {
      throw InfeasibleError("maf_min", "chromosome " + std::to_string(c) + " has " +
                                           std::to_string(eligible[c].size()) + " SNPs with MAF > " +
                                           std::to_string(maf_min) + ", need " + std::to_string(quota[c]));
    }
  }
  const bool check_correlation = rho_max < 1.0;
  std::map<std::size_t, std::vector<double>> columns;
  auto column = [&](std::size_t j) -> const std::vector<double>& {
    auto it = columns.find(j);
    if (it == columns.end()) it = columns.emplace(j, standardized_column(matrix, j)).first;
    return it->second;
  };
  constexpr int kAttempts = 50;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::size_t> chosen;
    bool complete = true;
    for (int c : chromosomes) {
      auto pool = eligible[c];
      rng.shuffle(pool.begin(), pool.end());
      std::size_t taken = 0;
      for (std::size_t j : pool) {
        if (taken == quota[c]) break;
        bool ok = true;
        if (check_correlation) {
          const auto& xj = column(j);
          if (xj.empty()) continue;
          for (std::size_t other : chosen) {
            if (std::abs(kernels::dot(xj, column(other))) >= rho_max) {
              ok = false;
              break;
            }
          }
        }
        if (ok) {
          chosen.push_back(j);
          ++taken;
        }
      }
      if (taken < quota[c]) {
        complete = false;
        break;
      }
    }
    if (complete) {
      std::ranges::sort(chosen);
      return chosen;
    }
  }
  throw InfeasibleError("rho_max", "could not find " + std::to_string(k) + " SNPs with pairwise |r| < " +
                                       std::to_string(rho_max) + " after " + std::to_string(kAttempts) +
                                       " attempts");
}

double mean_case_probability(const GenotypeMatrix& matrix, const std::vector<std::size_t>& causal,
                             const std::vector<double>& effects, double intercept) {
  return mean_probability(linear_predictor(matrix, causal, effects), intercept);
}

double calibrate_intercept(const GenotypeMatrix& matrix, const std::vector<std::size_t>& causal,
                           const std::vector<double>& effects) {
  if (std::ranges::all_of(effects, [](double b) { return b == 0.0; })) return 0.0;
  const auto eta = linear_predictor(matrix, causal, effects);
  double lo = -1.0, hi = 1.0;
  while (mean_probability(eta, lo) > 0.5) lo *= 2.0;
  while (mean_probability(eta, hi) < 0.5) hi *= 2.0;
  // Mean probability is strictly increasing in the intercept.
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_probability(eta, mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PhenotypeLabels simulate_trait(const GenotypeMatrix& matrix, const Scenario& scenario) {
  const auto eta = linear_predictor(matrix, scenario.causal_snps, scenario.effects);
  Rng rng(derive_seed(scenario.seed, scenario.replicate_id));
  PhenotypeLabels labels(matrix.n_individuals());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = rng.uniform() < logistic(scenario.intercept + eta[i]) ? 1 : 0;
  }
  return labels;
}

std::size_t choose_removed_causal(const GenotypeMatrix& matrix, Scenario& scenario, double proxy_min) {
  struct Candidate {
    std::size_t snp;
    double proxy;
  };
  std::vector<Candidate> candidates;
  for (std::size_t c : scenario.causal_snps) {
    const auto xc = standardized_column(matrix, c);
    if (xc.empty()) continue;
    const int chromosome = matrix.snp(c).chromosome;
    double best = 0.0;
    for (std::size_t j = 0; j < matrix.n_snps(); ++j) {
      if (j == c || matrix.snp(j).chromosome != chromosome) continue;
      const auto xj = standardized_column(matrix, j);
      if (xj.empty()) continue;
      best = std::max(best, std::abs(kernels::dot(xc, xj)));
    }
    if (best >= proxy_min) candidates.push_back({c, best});
  }
  std::ranges::sort(candidates, [](const Candidate& a, const Candidate& b) {
    if (a.proxy != b.proxy) return a.proxy > b.proxy;
    return a.snp < b.snp;
  });
  const std::size_t wanted = scenario.causal_snps.size() / 2;
  scenario.removed_causal.clear();
  for (std::size_t t = 0; t < std::min(wanted, candidates.size()); ++t) {
    scenario.removed_causal.push_back(candidates[t].snp);
  }
  std::ranges::sort(scenario.removed_causal);
  const std::size_t shortfall = wanted - scenario.removed_causal.size();
  if (shortfall > 0) {
    std::cerr << "warning: only " << scenario.removed_causal.size() << " of " << wanted
              << " causal SNPs have a proxy with |r| >= " << proxy_min << "; removing those only\n";
  }
  return shortfall;
}

RemovalResult remove_causal(const GenotypeMatrix& matrix, const Scenario& scenario) {
  RemovalResult result;
  result.scenario = scenario;
  std::vector<bool> removed(matrix.n_snps(), false);
  for (std::size_t j : scenario.removed_causal) removed.at(j) = true;
  for (std::size_t j = 0; j < matrix.n_snps(); ++j) {
    if (!removed[j]) result.kept.push_back(j);
  }
  result.analysis = scenario.removed_causal.empty() ? matrix : matrix.select_snps(result.kept);
  return result;
}

Scenario make_null_scenario(std::uint64_t seed, std::size_t replicate_id) {
  Scenario scenario;
  scenario.kind = Scenario::Kind::global_null;
  scenario.seed = seed;
  scenario.replicate_id = replicate_id;
  scenario.remove_half = false;
  return scenario;
}

Scenario make_trait_scenario(const GenotypeMatrix& matrix, std::size_t k, double effect_low, double effect_high,
                             double maf_min, double rho_max, bool remove_half, std::uint64_t seed,
                             std::size_t replicate_id) {
  Scenario scenario;
  scenario.kind = Scenario::Kind::complex_trait;
  scenario.k = k;
  scenario.effect_low = effect_low;
  scenario.effect_high = effect_high;
  scenario.maf_min = maf_min;
  scenario.rho_max = rho_max;
  scenario.remove_half = remove_half;
  scenario.seed = seed;
  scenario.replicate_id = replicate_id;
  // The causal set depends on the base seed only; replicates redraw labels.
  scenario.causal_snps = pick_causal(matrix, k, maf_min, rho_max, causal_seed(seed));
  scenario.effects = effect_grid(k, effect_low, effect_high);
  scenario.intercept = calibrate_intercept(matrix, scenario.causal_snps, scenario.effects);
  if (remove_half) choose_removed_causal(matrix, scenario);
  return scenario;
}

PhenotypeLabels simulate_phenotype(const GenotypeMatrix& matrix, const Scenario& scenario) {
  if (scenario.kind == Scenario::Kind::global_null) {
    return simulate_null(matrix, derive_seed(scenario.seed, scenario.replicate_id));
  }
  return simulate_trait(matrix, scenario);
}

namespace {

std::string join_ids(const GenotypeMatrix& matrix, const std::vector<std::size_t>& snps) {
  std::string out;
  for (std::size_t j : snps) {
    if (!out.empty()) out += ',';
    out += matrix.snp(j).snp_id;
  }
  return out;
}

std::string join_reals(const std::vector<double>& values) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t t = 0; t < values.size(); ++t) out << (t ? "," : "") << values[t];
  return out.str();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    parts.push_back(text.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

void write_scenario(const GenotypeMatrix& matrix, const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "kind=" << to_string(scenario.kind) << '\n'
      << "seed=" << scenario.seed << '\n'
      << "k=" << scenario.k << '\n'
      << "effect_low=" << scenario.effect_low << '\n'
      << "effect_high=" << scenario.effect_high << '\n'
      << "maf_min=" << scenario.maf_min << '\n'
      << "rho_max=" << scenario.rho_max << '\n'
      << "replicate_id=" << scenario.replicate_id << '\n'
      << "remove_half=" << (scenario.remove_half ? 1 : 0) << '\n'
      << "intercept=" << scenario.intercept << '\n'
      << "causal=" << join_ids(matrix, scenario.causal_snps) << '\n'
      << "effects=" << join_reals(scenario.effects) << '\n'
      << "removed=" << join_ids(matrix, scenario.removed_causal) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Scenario read_scenario(const GenotypeMatrix& matrix, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path.string() + ": expected key=value, got '" + line + "'");
    values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = values.find(key);
    if (it == values.end()) throw FormatError(path.string() + ": missing key " + key);
    return it->second;
  };
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < matrix.n_snps(); ++j) index.emplace(matrix.snp(j).snp_id, j);
  auto ids = [&](const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& id : split_commas(values.count(key) ? values.at(key) : std::string())) {
      const auto it = index.find(id);
      if (it == index.end()) throw ValidationError(path.string() + ": unknown SNP id " + id);
      out.push_back(it->second);
    }
    return out;
  };
  Scenario s;
  const auto& kind = get("kind");
  if (kind == "global_null") {
    s.kind = Scenario::Kind::global_null;
  } else if (kind == "complex_trait") {
    s.kind = Scenario::Kind::complex_trait;
  } else {
    throw FormatError(path.string() + ": unknown scenario kind " + kind);
  }
  s.seed = std::stoull(get("seed"));
  s.k = std::stoul(get("k"));
  s.effect_low = std::stod(get("effect_low"));
  s.effect_high = std::stod(get("effect_high"));
  s.maf_min = std::stod(get("maf_min"));
  s.rho_max = std::stod(get("rho_max"));
  s.replicate_id = std::stoul(get("replicate_id"));
  s.remove_half = values.count("remove_half") && values.at("remove_half") == "1";
  s.intercept = values.count("intercept") ? std::stod(values.at("intercept")) : 0.0;
  s.causal_snps = ids("causal");
  for (const auto& v : split_commas(values.count("effects") ? values.at("effects") : std::string())) {
    s.effects.push_back(std::stod(v));
  }
  s.removed_causal = ids("removed");
  if (s.effects.size() != s.causal_snps.size()) throw FormatError(path.string() + ": effects and causal differ");
  return s;
}

}  // namespace gwas
