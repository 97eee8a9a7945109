#include "gwas/search.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <limits>

#include "gwas/errors.hpp"
#include "gwas/parallel.hpp"
#include "gwas/tsv.hpp"

namespace gwas {

namespace {

// A move must lower the criterion by more than this to be accepted; refits of
// the same model from different warm starts agree far more closely.
constexpr double kImprovement = 1e-8;
// Forward candidates are fitted in fixed-size batches so the set of fits does
// not depend on the thread count.
constexpr std::size_t kForwardBatch = 16;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool improves(double candidate, double incumbent) { return candidate < incumbent - kImprovement; }

Eigen::VectorXd warm_with_added(const Model& model) {
  Eigen::VectorXd start(model.fit.coefficients.size() + 1);
  start.head(model.fit.coefficients.size()) = model.fit.coefficients;
  start[start.size() - 1] = 0.0;
  return start;
}

Eigen::VectorXd warm_with_removed(const Eigen::VectorXd& coefficients, Eigen::Index column) {
  Eigen::VectorXd start(coefficients.size() - 1);
  start.head(column) = coefficients.head(column);
  start.tail(coefficients.size() - column - 1) = coefficients.tail(coefficients.size() - column - 1);
  return start;
}

Eigen::Index first_snp_column(const GenotypeMatrix& matrix) {
  return 1 + static_cast<Eigen::Index>(matrix.n_covariates());
}

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::ranges::find(v, x) != v.end(); }

void count_fits(SearchStats& stats, std::size_t k, std::size_t count, std::size_t failed) {
  stats.fits += count;
  stats.failed_fits += failed;
  stats.fits_by_k[k] += count;
}

// Candidate models for one step, fitted concurrently into per-index slots.
std::vector<std::optional<Model>> fit_all(const SearchState& state, const std::vector<std::vector<std::size_t>>& sets,
                                          const std::vector<Eigen::VectorXd>& starts, const Criterion& criterion) {
  std::vector<std::optional<Model>> out(sets.size());
  parallel_for(sets.size(), state.config.threads, [&](std::size_t t) {
    out[t] = fit_model(*state.matrix, sets[t], criterion, state.config.fit, &starts[t]);
  });
  return out;
}

std::size_t failures(const std::vector<std::optional<Model>>& fits) {
  return static_cast<std::size_t>(std::ranges::count_if(fits, [](const auto& m) { return !m.has_value(); }));
}

void record(SearchState& state, std::string step, std::vector<std::size_t> added, std::vector<std::size_t> removed) {
  state.trace.push_back({state.round, std::move(step), std::move(added), std::move(removed), state.model.size(),
                         state.model.criterion_value});
  ++state.stats.accepted_steps;
}

}  // namespace

void SearchConfig::validate() const {
  if (m1 == 0 || m1 > m2) throw ArgumentError("search config requires 1 <= m1 <= m2");
  if (d_floor == 0 || d_floor > d) throw ArgumentError("search config requires 1 <= d_floor <= d");
  if (backward_repeats != 3) throw ArgumentError("backward elimination is repeated exactly three times");
  if (max_model_size == 0) throw ArgumentError("max_model_size must be positive");
}

std::size_t SearchConfig::effective_d(std::size_t model_size) const {
  if (model_size <= d_shrink_threshold) return d;
  return std::max(d_floor, d / 2);
}

void SearchStats::merge(const SearchStats& other) {
  fits += other.fits;
  failed_fits += other.failed_fits;
  for (const auto& [k, count] : other.fits_by_k) fits_by_k[k] += count;
  forward_scans += other.forward_scans;
  exchange_scans += other.exchange_scans;
  backward_scans += other.backward_scans;
  accepted_steps += other.accepted_steps;
  rank_seconds += other.rank_seconds;
  forward_seconds += other.forward_seconds;
  exchange_seconds += other.exchange_seconds;
  backward_seconds += other.backward_seconds;
}

std::optional<Model> fit_model(const GenotypeMatrix& matrix, std::vector<std::size_t> snps, const Criterion& criterion,
                               const FitOptions& options, const Eigen::VectorXd* warm_start) {
  Model model;
  model.snp_indices = std::move(snps);
  try {
    model.fit = fit_firth(matrix, DesignSpec{model.snp_indices, true}, options, warm_start);
  } catch (const RankError&) {
    return std::nullopt;
  }
  if (!model.fit.converged) return std::nullopt;
  model.criterion_used = criterion;
  model.criterion_value = evaluate(criterion, model.fit.penalized_loglik, static_cast<long>(model.size()),
                                   static_cast<double>(matrix.n_individuals()), static_cast<double>(matrix.n_snps()));
  return model;
}

Model null_model(const GenotypeMatrix& matrix, const Criterion& criterion, const FitOptions& options) {
  auto model = fit_model(matrix, {}, criterion, options);
  if (!model) throw ValidationError("intercept-only model failed to converge");
  return *model;
}

Model rescore(const GenotypeMatrix& matrix, const Model& model, const Criterion& criterion) {
  Model out = model;
  out.criterion_used = criterion;
  out.criterion_value = evaluate(criterion, model.fit.penalized_loglik, static_cast<long>(model.size()),
                                 static_cast<double>(matrix.n_individuals()), static_cast<double>(matrix.n_snps()));
  return out;
}

SearchState make_search_state(const GenotypeMatrix& matrix, const Model& initial, const SearchConfig& config,
                              int round) {
  config.validate();
  SearchState state;
  state.matrix = &matrix;
  state.config = config;
  state.model = initial;
  state.round = round;
  return state;
}

bool directed_forward_step(SearchState& state, const Ranking& ranking, const Criterion& criterion) {
  const auto start_time = Clock::now();
  ++state.stats.forward_scans;
  bool changed = false;
  if (state.model.size() >= state.config.max_model_size) {
    if (!state.size_cap_warned) {
      std::cerr << "warning: model reached max_model_size=" << state.config.max_model_size
                << "; forward additions stopped\n";
      state.size_cap_warned = true;
    }
    state.stats.forward_seconds += seconds_since(start_time);
    return false;
  }
  const std::size_t group = std::min(state.config.m1, ranking.size());
  const Eigen::VectorXd warm = warm_with_added(state.model);
  while (state.forward_cursor < group && !changed) {
    std::vector<std::size_t> positions;
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t pos = state.forward_cursor; pos < group && positions.size() < kForwardBatch; ++pos) {
      const std::size_t snp = ranking.snps[pos];
      if (contains(state.model.snp_indices, snp)) continue;
      positions.push_back(pos);
      auto set = state.model.snp_indices;
      set.push_back(snp);
      sets.push_back(std::move(set));
    }
    if (positions.empty()) {
      state.forward_cursor = group;
      break;
    }
    const std::vector<Eigen::VectorXd> starts(sets.size(), warm);
    auto fits = fit_all(state, sets, starts, criterion);
    count_fits(state.stats, state.model.size() + 1, fits.size(), failures(fits));
    state.forward_cursor = positions.back() + 1;
    for (std::size_t t = 0; t < fits.size(); ++t) {
      if (fits[t] && improves(fits[t]->criterion_value, state.model.criterion_value)) {
        state.model = std::move(*fits[t]);
        state.forward_cursor = positions[t] + 1;
        record(state, "forward", {ranking.snps[positions[t]]}, {});
        changed = true;
        break;
      }
    }
  }
  state.stats.forward_seconds += seconds_since(start_time);
  return changed;
}

bool exchange_step(SearchState& state, const Ranking& ranking, const Criterion& criterion) {
  const auto start_time = Clock::now();
  ++state.stats.exchange_scans;
  const auto& matrix = *state.matrix;
  const std::size_t p = matrix.n_snps();
  std::vector<bool> in_group(p, false);
  const std::size_t group = std::min(state.config.m2, ranking.size());
  for (std::size_t pos = 0; pos < group; ++pos) in_group[ranking.snps[pos]] = true;

  bool changed = false;
  const Eigen::Index offset = first_snp_column(matrix);
  for (std::size_t slot = 0; slot < state.model.size(); ++slot) {
    const std::size_t window = state.config.effective_d(state.model.size());
    const std::size_t current = state.model.snp_indices[slot];
    const int chromosome = matrix.snp(current).chromosome;
    const std::size_t lo = current >= window - 1 ? current - (window - 1) : 0;
    const std::size_t hi = std::min(p - 1, current + (window - 1));
    std::vector<std::size_t> candidates;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == current || !in_group[j] || matrix.snp(j).chromosome != chromosome) continue;
      if (contains(state.model.snp_indices, j)) continue;
      candidates.push_back(j);
    }
    if (candidates.empty()) continue;
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t j : candidates) {
      auto set = state.model.snp_indices;
      set[slot] = j;
      sets.push_back(std::move(set));
    }
    Eigen::VectorXd warm = state.model.fit.coefficients;
    warm[offset + static_cast<Eigen::Index>(slot)] = 0.0;
    const std::vector<Eigen::VectorXd> starts(sets.size(), warm);
    auto fits = fit_all(state, sets, starts, criterion);
    count_fits(state.stats, state.model.size(), fits.size(), failures(fits));
    std::optional<std::size_t> best;
    for (std::size_t t = 0; t < fits.size(); ++t) {
      if (!fits[t]) continue;
      if (!best || fits[t]->criterion_value < fits[*best]->criterion_value) best = t;
    }
    if (best && improves(fits[*best]->criterion_value, state.model.criterion_value)) {
      state.model = std::move(*fits[*best]);
      record(state, "exchange", {candidates[*best]}, {current});
      changed = true;
    }
  }
  state.stats.exchange_seconds += seconds_since(start_time);
  return changed;
}

namespace {

// Best single removal from `model`; nullopt when every refit fails.
std::optional<std::pair<Model, std::size_t>> best_removal(SearchState& state, const Model& model,
                                                          const Criterion& criterion) {
  const Eigen::Index offset = first_snp_column(*state.matrix);
  std::vector<std::vector<std::size_t>> sets;
  std::vector<Eigen::VectorXd> starts;
  for (std::size_t slot = 0; slot < model.size(); ++slot) {
    auto set = model.snp_indices;
    set.erase(set.begin() + static_cast<std::ptrdiff_t>(slot));
    sets.push_back(std::move(set));
    starts.push_back(warm_with_removed(model.fit.coefficients, offset + static_cast<Eigen::Index>(slot)));
  }
  auto fits = fit_all(state, sets, starts, criterion);
  count_fits(state.stats, model.size() - 1, fits.size(), failures(fits));
  std::optional<std::size_t> best;
  for (std::size_t t = 0; t < fits.size(); ++t) {
    if (!fits[t]) continue;
    if (!best || fits[t]->criterion_value < fits[*best]->criterion_value) best = t;
  }
  if (!best) return std::nullopt;
  return std::make_pair(std::move(*fits[*best]), model.snp_indices[*best]);
}

}  // namespace

bool backward_step(SearchState& state, const Criterion& criterion) {
  const auto start_time = Clock::now();
  ++state.stats.backward_scans;
  auto finish = [&](bool changed) {
    state.stats.backward_seconds += seconds_since(start_time);
    return changed;
  };
  if (state.model.size() == 0) return finish(false);

  auto first = best_removal(state, state.model, criterion);
  if (!first) return finish(false);
  if (improves(first->first.criterion_value, state.model.criterion_value)) {
    state.model = std::move(first->first);
    record(state, "backward", {}, {first->second});
    return finish(true);
  }

  // Speculative chain: keep removing the least harmful SNP and remember the
  // best model seen along the way.
  Model chain = std::move(first->first);
  std::vector<std::size_t> chain_removed{first->second};
  std::optional<Model> best_seen;
  std::vector<std::size_t> best_removed;
  for (std::size_t repeat = 0; repeat < state.config.backward_repeats && chain.size() > 0; ++repeat) {
    auto next = best_removal(state, chain, criterion);
    if (!next) break;
    chain = std::move(next->first);
    chain_removed.push_back(next->second);
    if (!best_seen || chain.criterion_value < best_seen->criterion_value) {
      best_seen = chain;
      best_removed = chain_removed;
    }
  }
  if (best_seen && improves(best_seen->criterion_value, state.model.criterion_value)) {
    state.model = std::move(*best_seen);
    record(state, "backward_chain", {}, best_removed);
    return finish(true);
  }
  return finish(false);
}

FssOutcome fss_run(const GenotypeMatrix& matrix, const Model& initial, const Ranking& ranking,
                   const Criterion& criterion, const SearchConfig& config, int round) {
  for (std::size_t snp : initial.snp_indices) {
    if (contains(ranking.snps, snp)) throw ArgumentError("ranking must exclude SNPs of the initial model");
  }
  SearchState state = make_search_state(matrix, rescore(matrix, initial, criterion), config, round);
  record(state, "start", {}, {});
  --state.stats.accepted_steps;
  for (;;) {
    bool improved = false;
    state.forward_cursor = 0;
    while (directed_forward_step(state, ranking, criterion)) {
      improved = true;
      exchange_step(state, ranking, criterion);
    }
    while (backward_step(state, criterion)) improved = true;
    if (!improved) break;
  }
  return {std::move(state.model), std::move(state.trace), state.stats};
}

Model fss(const GenotypeMatrix& matrix, const Model& initial, const Ranking& ranking, const Criterion& criterion,
          const SearchConfig& config) {
  return fss_run(matrix, initial, ranking, criterion, config).model;
}

SelectionResult select_model(const GenotypeMatrix& matrix, const SearchConfig& config) {
  config.validate();
  SelectionResult result;
  const std::array<Criterion, 3> criteria{Criterion::mbic60(), Criterion::mbic60(), Criterion::mbic2()};
  Model current = null_model(matrix, criteria[0], config.fit);
  for (int round = 1; round <= 3; ++round) {
    const auto rank_start = Clock::now();
    Ranking ranking;
    if (round == 1) {
      ranking = rank_marginal(matrix, config.threads);
    } else {
      ranking = rank_conditional(matrix, current.fit, DesignSpec{current.snp_indices, true}, config.threads);
    }
    const double rank_seconds = seconds_since(rank_start);
    auto outcome = fss_run(matrix, current, ranking, criteria[round - 1], config, round);
    outcome.stats.rank_seconds += rank_seconds;
    auto& summary = result.rounds[round - 1];
    summary.round = round;
    summary.criterion = criteria[round - 1];
    summary.ranking_source = ranking.source;
    summary.model = outcome.model;
    summary.accepted_steps = outcome.stats.accepted_steps;
    result.trace.insert(result.trace.end(), outcome.trace.begin(), outcome.trace.end());
    result.stats.merge(outcome.stats);
    current = std::move(outcome.model);
  }
  result.final_model = std::move(current);
  return result;
}

void write_model_tsv(const GenotypeMatrix& matrix, const Model& model, const std::filesystem::path& path) {
  tsv::Writer out(path);
  out.meta("criterion", model.criterion_used.name());
  out.meta("criterion_value", tsv::real(model.criterion_value, 12));
  out.meta("penalized_loglik", tsv::real(model.fit.penalized_loglik, 12));
  out.meta("n", std::to_string(matrix.n_individuals()));
  out.meta("p", std::to_string(matrix.n_snps()));
  out.meta("intercept", tsv::real(model.fit.coefficients[0]));
  out.row({"snp_id", "chrom", "pos", "coefficient"});
  const Eigen::Index offset = first_snp_column(matrix);
  for (std::size_t slot = 0; slot < model.size(); ++slot) {
    const auto& snp = matrix.snp(model.snp_indices[slot]);
    out.row({snp.snp_id, std::to_string(snp.chromosome), std::to_string(snp.position_bp),
             tsv::real(model.fit.coefficients[offset + static_cast<Eigen::Index>(slot)])});
  }
}

void write_trace_tsv(const GenotypeMatrix& matrix, const std::vector<TraceRecord>& trace,
                     const std::filesystem::path& path) {
  auto ids = [&](const std::vector<std::size_t>& snps) {
    if (snps.empty()) return std::string(".");
    std::string joined;
    for (std::size_t j : snps) {
      if (!joined.empty()) joined += ',';
      joined += matrix.snp(j).snp_id;
    }
    return joined;
  };
  tsv::Writer out(path);
  out.row({"round", "step_type", "snp_added", "snp_removed", "k", "criterion_value"});
  for (const auto& r : trace) {
    out.row({std::to_string(r.round), r.step_type, ids(r.added), ids(r.removed), std::to_string(r.k),
             tsv::real(r.criterion_value, 12)});
  }
}

std::vector<std::string> read_model_snp_ids(const std::filesystem::path& path) {
  const auto rows = tsv::read(path);
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) ids.push_back(rows[r].at(0));
  return ids;
}

}  // namespace gwas
