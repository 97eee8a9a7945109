#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwas/association.hpp"
#include "gwas/criteria.hpp"
#include "gwas/firth.hpp"
#include "gwas/genotype.hpp"

namespace gwas {

struct SearchConfig {
  std::size_t m1 = 350;   // directed-forward group G1: top m1 of the ranking
  std::size_t m2 = 5000;  // exchange group G2: top m2 of the ranking
  std::size_t d = 50;     // exchange window, in marker positions
  std::size_t max_model_size = 50;
  std::size_t d_shrink_threshold = 25;
  std::size_t d_floor = 5;
  std::size_t backward_repeats = 3;
  unsigned threads = 1;
  FitOptions fit;

  void validate() const;
  // Exchange window for a model of the given size.
  std::size_t effective_d(std::size_t model_size) const;
};

struct Model {
  std::vector<std::size_t> snp_indices;  // inclusion order
  FitResult fit;
  double criterion_value = 0.0;
  Criterion criterion_used;

  std::size_t size() const noexcept { return snp_indices.size(); }
};

struct TraceRecord {
  int round = 0;
  std::string step_type;  // start, forward, exchange, backward, backward_chain
  std::vector<std::size_t> added;
  std::vector<std::size_t> removed;
  std::size_t k = 0;
  double criterion_value = 0.0;
};

struct SearchStats {
  std::size_t fits = 0;
  std::size_t failed_fits = 0;
  std::map<std::size_t, std::size_t> fits_by_k;  // model size -> fit count
  std::size_t forward_scans = 0;
  std::size_t exchange_scans = 0;
  std::size_t backward_scans = 0;
  std::size_t accepted_steps = 0;
  double rank_seconds = 0.0;
  double forward_seconds = 0.0;
  double exchange_seconds = 0.0;
  double backward_seconds = 0.0;

  void merge(const SearchStats& other);
};

// Mutable search incumbent plus bookkeeping for one FSS call.
struct SearchState {
  const GenotypeMatrix* matrix = nullptr;
  SearchConfig config;
  Model model;
  std::size_t forward_cursor = 0;  // next G1 position for the directed-forward scan
  int round = 0;
  bool size_cap_warned = false;
  std::vector<TraceRecord> trace;
  SearchStats stats;
};

// Fits the given SNP set and scores it. nullopt when the design is rank
// deficient or the fit does not converge.
std::optional<Model> fit_model(const GenotypeMatrix& matrix, std::vector<std::size_t> snps, const Criterion& criterion,
                               const FitOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);
Model null_model(const GenotypeMatrix& matrix, const Criterion& criterion, const FitOptions& options = {});
// Same model scored under a different criterion.
Model rescore(const GenotypeMatrix& matrix, const Model& model, const Criterion& criterion);

SearchState make_search_state(const GenotypeMatrix& matrix, const Model& initial, const SearchConfig& config,
                              int round = 0);

bool directed_forward_step(SearchState& state, const Ranking& ranking, const Criterion& criterion);
bool exchange_step(SearchState& state, const Ranking& ranking, const Criterion& criterion);
bool backward_step(SearchState& state, const Criterion& criterion);

struct FssOutcome {
  Model model;
  std::vector<TraceRecord> trace;
  SearchStats stats;
};

FssOutcome fss_run(const GenotypeMatrix& matrix, const Model& initial, const Ranking& ranking,
                   const Criterion& criterion, const SearchConfig& config, int round = 0);
Model fss(const GenotypeMatrix& matrix, const Model& initial, const Ranking& ranking, const Criterion& criterion,
          const SearchConfig& config);

struct RoundSummary {
  int round = 0;
  Criterion criterion;
  Ranking::Source ranking_source = Ranking::Source::trend;
  Model model;
  std::size_t accepted_steps = 0;
};

struct SelectionResult {
  Model final_model;
  std::array<RoundSummary, 3> rounds;
  std::vector<TraceRecord> trace;
  SearchStats stats;
};

// Three rounds: trend ranking + mBIC_60, conditional score ranking + mBIC_60,
// conditional score ranking + mBIC2.
SelectionResult select_model(const GenotypeMatrix& matrix, const SearchConfig& config = {});

// TSV: snp_id chrom pos coefficient
void write_model_tsv(const GenotypeMatrix& matrix, const Model& model, const std::filesystem::path& path);
// TSV: round step_type snp_added snp_removed k criterion_value
void write_trace_tsv(const GenotypeMatrix& matrix, const std::vector<TraceRecord>& trace,
                     const std::filesystem::path& path);
// SNP ids listed in a model TSV.
std::vector<std::string> read_model_snp_ids(const std::filesystem::path& path);

}  // namespace gwas
