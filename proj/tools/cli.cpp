#include "gwas/cli.hpp"

#include <CLI11.hpp>
#include <boost/crc.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "gwas/association.hpp"
#include "gwas/errors.hpp"
#include "gwas/evaluation.hpp"
#include "gwas/genotype.hpp"
#include "gwas/kernels.hpp"
#include "gwas/rng.hpp"
#include "gwas/search.hpp"
#include "gwas/simulation.hpp"
#include "gwas/tsv.hpp"

namespace gwas::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json config_json(const RunConfig& c) {
  return json{{"subcommand", c.subcommand},   {"bfile", c.bfile},
              {"out", c.out},                 {"pheno", c.pheno},
              {"covar", c.covar},             {"sim_dir", c.sim_dir},
              {"results", c.results},         {"seed", c.seed},
              {"threads", c.threads},         {"m1", c.m1},
              {"m2", c.m2},                   {"d", c.d},
              {"cluster_C", c.cluster_c},     {"maf_min", c.maf_min},
              {"hwe_alpha", c.hwe_alpha},     {"bh_alpha", c.bh_alpha},
              {"replicates", c.replicates},   {"k_causal", c.k_causal},
              {"effect_low", c.effect_low},   {"effect_high", c.effect_high},
              {"causal_maf", c.causal_maf},   {"rho_max", c.rho_max},
              {"remove_half", c.remove_half}, {"skip_qc", c.skip_qc},
              {"isa", c.isa},                 {"n", c.n_individuals},
              {"p", c.n_snps},                {"chromosomes", c.n_chromosomes},
              {"latent_loading", c.latent_loading}};
}

std::string crc32_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  boost::crc_32_type crc;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof buffer);
    crc.process_bytes(buffer, static_cast<std::size_t>(in.gcount()));
  }
  char hex[16];
  std::snprintf(hex, sizeof hex, "%08x", crc.checksum());
  return hex;
}

class RunRecorder {
 public:
  explicit RunRecorder(const RunConfig& config) : config_(config), start_(std::chrono::steady_clock::now()) {}

  void input(const fs::path& path) {
    if (fs::exists(path)) inputs_[path.string()] = crc32_hex(path);
  }
  void bfile_inputs(const std::string& prefix) {
    for (const char* ext : {".bed", ".bim", ".fam"}) input(prefix + ext);
  }

  void finish(const fs::path& out_dir) const {
    const json config = config_json(config_);
    {
      std::ofstream out(out_dir / "config.json");
      out << config.dump(2) << '\n';
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json manifest{{"version", kVersion},
                        {"config", config},
                        {"inputs", inputs_},
                        {"kernel_isa", std::string(kernels::isa_name(kernels::active_isa()))},
                        {"wall_clock_seconds", seconds}};
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) throw IoError("failed writing manifest in " + out_dir.string());
  }

 private:
  const RunConfig& config_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
};

fs::path require_out(const RunConfig& config) {
  if (config.out.empty()) throw ArgumentError("--out is required");
  fs::create_directories(config.out);
  return config.out;
}

void require_bfile(const RunConfig& config) {
  if (config.bfile.empty()) throw ArgumentError("--bfile is required");
}

std::string replicate_name(std::size_t r) {
  char name[32];
  std::snprintf(name, sizeof name, "rep_%04zu", r);
  return name;
}

std::vector<fs::path> replicate_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("rep_", 0) == 0) dirs.push_back(entry.path());
  }
  std::ranges::sort(dirs);
  if (dirs.empty()) throw ValidationError("no rep_* directories under " + root.string());
  return dirs;
}

GenotypeMatrix load_analysis_input(const RunConfig& config, RunRecorder& recorder) {
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  GenotypeMatrix matrix = load_plink(config.bfile);
  if (!config.pheno.empty()) {
    recorder.input(config.pheno);
    matrix = matrix.with_phenotype(read_fam_phenotype(config.pheno, matrix.n_individuals()));
  }
  if (!matrix.has_phenotype()) throw ValidationError("no case/control phenotype in input");
  matrix = matrix.drop_missing_phenotype();
  if (!config.covar.empty()) {
    recorder.input(config.covar);
    matrix = matrix.with_covariates(read_covariates(config.covar, matrix));
  }
  return matrix;
}

SearchConfig search_config(const RunConfig& config) {
  SearchConfig search;
  search.m1 = config.m1;
  search.m2 = config.m2;
  search.d = config.d;
  search.threads = config.threads;
  return search;
}

// m2 is capped at p; m1 follows when p is tiny.
SearchConfig capped_search_config(const RunConfig& config, std::size_t p) {
  SearchConfig search = search_config(config);
  search.m2 = std::min(search.m2, p);
  search.m1 = std::min(search.m1, search.m2);
  return search;
}

void write_detections(const GenotypeMatrix& matrix, const std::vector<std::size_t>& snps, const fs::path& path) {
  tsv::Writer out(path);
  out.row({"snp_id", "chrom", "pos"});
  for (std::size_t j : snps) {
    const auto& s = matrix.snp(j);
    out.row({s.snp_id, std::to_string(s.chromosome), std::to_string(s.position_bp)});
  }
}

int run_qc(const RunConfig& config) {
  RunRecorder recorder(config);
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  const auto out_dir = require_out(config);
  const GenotypeMatrix matrix = load_plink(config.bfile);
  const QcThresholds thresholds{config.maf_min, config.hwe_alpha};
  const auto keep = qc_pass_indices(matrix, thresholds);
  {
    tsv::Writer report(out_dir / "qc_report.tsv");
    report.meta("maf_min", tsv::real(config.maf_min));
    report.meta("hwe_alpha", tsv::real(config.hwe_alpha));
    report.row({"snp_id", "chrom", "pos", "maf", "missing_rate", "hwe_chisq", "hwe_p", "pass"});
    std::size_t next = 0;
    for (std::size_t j = 0; j < matrix.n_snps(); ++j) {
      const bool pass = next < keep.size() && keep[next] == j;
      if (pass) ++next;
      const auto& s = matrix.snp(j);
      const auto hwe = hwe_test(matrix, j);
      report.row({s.snp_id, std::to_string(s.chromosome), std::to_string(s.position_bp),
                  tsv::real(s.minor_allele_freq), tsv::real(s.missing_rate), tsv::real(hwe.chi_square),
                  tsv::real(hwe.p_value), pass ? "1" : "0"});
    }
  }
  write_plink(qc_filter(matrix, thresholds), out_dir / "qc");
  recorder.finish(out_dir);
  return kOk;
}

int run_assoc(const RunConfig& config) {
  RunRecorder recorder(config);
  const auto out_dir = require_out(config);
  const auto matrix = load_analysis_input(config, recorder);
  const auto result = single_marker_analysis(matrix, config.bh_alpha, config.threads);
  write_association_tsv(matrix, result, config.bh_alpha, out_dir / "assoc.tsv");
  recorder.finish(out_dir);
  return kOk;
}

void select_one(const GenotypeMatrix& matrix, const RunConfig& config, const fs::path& dir) {
  const auto result = select_model(matrix, capped_search_config(config, matrix.n_snps()));
  write_model_tsv(matrix, result.final_model, dir / "model.tsv");
  write_trace_tsv(matrix, result.trace, dir / "trace.tsv");
}

int run_select(const RunConfig& config) {
  RunRecorder recorder(config);
  const auto out_dir = require_out(config);
  if (config.sim_dir.empty()) {
    auto matrix = load_analysis_input(config, recorder);
    if (!config.skip_qc) matrix = qc_filter(matrix, {config.maf_min, config.hwe_alpha});
    select_one(matrix, config, out_dir);
    recorder.finish(out_dir);
    return kOk;
  }
  // Replicate mode: genotypes from --bfile, labels and removals per replicate.
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  const GenotypeMatrix genotypes = load_plink(config.bfile);
  for (const auto& rep : replicate_dirs(config.sim_dir)) {
    const Scenario scenario = read_scenario(genotypes, rep / "scenario.txt");
    recorder.input(rep / "pheno.fam");
    const auto labelled =
        genotypes.with_phenotype(read_fam_phenotype(rep / "pheno.fam", genotypes.n_individuals()));
    const auto removal = remove_causal(labelled, scenario);
    const auto rep_out = out_dir / rep.filename();
    fs::create_directories(rep_out);
    select_one(removal.analysis, config, rep_out);
    const auto single = single_marker_bh(removal.analysis, config.bh_alpha, config.threads);
    write_detections(removal.analysis, single, rep_out / "single_marker.tsv");
  }
  recorder.finish(out_dir);
  return kOk;
}

int run_simulate(const RunConfig& config, bool trait) {
  RunRecorder recorder(config);
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  const auto out_dir = require_out(config);
  const GenotypeMatrix genotypes = load_plink(config.bfile).without_phenotype();
  std::optional<Scenario> base;
  if (trait) {
    base = make_trait_scenario(genotypes, config.k_causal, config.effect_low, config.effect_high, config.causal_maf,
                               config.rho_max, config.remove_half, config.seed, 0);
  }
  for (std::size_t r = 0; r < config.replicates; ++r) {
    Scenario scenario = trait ? *base : make_null_scenario(config.seed, r);
    scenario.replicate_id = r;
    const auto labels = simulate_phenotype(genotypes, scenario);
    const auto rep_dir = out_dir / replicate_name(r);
    fs::create_directories(rep_dir);
    write_scenario(genotypes, scenario, rep_dir / "scenario.txt");
    write_fam(genotypes.with_phenotype(labels), rep_dir / "pheno.fam");
  }
  recorder.finish(out_dir);
  return kOk;
}

std::vector<std::size_t> ids_to_indices(const GenotypeMatrix& matrix, const std::vector<std::string>& ids) {
  std::vector<std::size_t> out;
  for (const auto& id : ids) {
    const auto j = matrix.find_snp(id);
    if (!j) throw ValidationError("unknown SNP id in results: " + id);
    out.push_back(*j);
  }
  return out;
}

int run_evaluate(const RunConfig& config) {
  RunRecorder recorder(config);
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  const auto out_dir = require_out(config);
  if (config.sim_dir.empty()) throw ArgumentError("--sim-dir is required");
  const fs::path results = config.results.empty() ? fs::path(config.sim_dir) : fs::path(config.results);
  const GenotypeMatrix genotypes = load_plink(config.bfile).without_phenotype();
  std::vector<EvalReport> mos, sm;
  {
    tsv::Writer table(out_dir / "evaluation.tsv");
    table.meta("cluster_C", tsv::real(config.cluster_c));
    table.row({"replicate", "method", "size", "tp", "fp", "power", "fdr", "mis"});
    for (const auto& rep : replicate_dirs(config.sim_dir)) {
      const Scenario scenario = read_scenario(genotypes, rep / "scenario.txt");
      const auto rep_results = results / rep.filename();
      recorder.input(rep_results / "model.tsv");
      const auto model = ids_to_indices(genotypes, read_model_snp_ids(rep_results / "model.tsv"));
      mos.push_back(evaluate_replicate(genotypes, model, scenario, config.cluster_c, false));
      std::vector<EvalReport>* sinks[2] = {&mos, nullptr};
      if (fs::exists(rep_results / "single_marker.tsv")) {
        const auto single = ids_to_indices(genotypes, read_model_snp_ids(rep_results / "single_marker.tsv"));
        sm.push_back(evaluate_replicate(genotypes, single, scenario, config.cluster_c, true));
        sinks[1] = &sm;
      }
      const char* names[2] = {"MOS", "SM"};
      for (int m = 0; m < 2; ++m) {
        if (!sinks[m]) continue;
        const auto& r = sinks[m]->back();
        table.row({rep.filename().string(), names[m], std::to_string(r.size), std::to_string(r.true_positives),
                   tsv::real(r.fp), tsv::real(r.power), tsv::real(r.fdr), tsv::real(r.misclassifications)});
      }
    }
  }
  {
    const auto mos_summary = aggregate(mos);
    std::optional<EvalSummary> sm_summary;
    if (!sm.empty()) sm_summary = aggregate(sm);
    tsv::Writer summary(out_dir / "summary.tsv");
    summary.meta("cluster_C", tsv::real(config.cluster_c));
    summary.meta("replicates", std::to_string(mos_summary.replicates));
    std::vector<std::string> header{"metric", "MOS", "MOS_se"};
    if (sm_summary) {
      header.push_back("SM");
      header.push_back("SM_se");
    }
    summary.row(header);
    auto line = [&](const std::string& metric, double EvalSummary::*mean, double EvalSummary::*se) {
      std::vector<std::string> fields{metric, tsv::real(mos_summary.*mean, 6), tsv::real(mos_summary.*se, 6)};
      if (sm_summary) {
        fields.push_back(tsv::real((*sm_summary).*mean, 6));
        fields.push_back(tsv::real((*sm_summary).*se, 6));
      }
      summary.row(fields);
    };
    line("Size", &EvalSummary::size, &EvalSummary::size_se);
    line("Power", &EvalSummary::power, &EvalSummary::power_se);
    line("FP", &EvalSummary::fp, &EvalSummary::fp_se);
    line("FDR", &EvalSummary::fdr, &EvalSummary::fdr_se);
    line("Mis", &EvalSummary::misclassifications, &EvalSummary::misclassifications_se);
  }
  recorder.finish(out_dir);
  return kOk;
}

int run_bench(const RunConfig& config) {
  RunRecorder recorder(config);
  const auto out_dir = require_out(config);
  require_bfile(config);
  recorder.bfile_inputs(config.bfile);
  const auto load_start = std::chrono::steady_clock::now();
  GenotypeMatrix matrix = load_plink(config.bfile);
  const double load_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - load_start).count();
  if (!config.pheno.empty()) {
    matrix = matrix.with_phenotype(read_fam_phenotype(config.pheno, matrix.n_individuals()));
  }
  if (!matrix.phenotype_complete()) {
    // No usable labels: benchmark on a global-null draw.
    matrix = matrix.with_phenotype(simulate_null(matrix, derive_seed(config.seed, 0)));
  }
  const auto result = select_model(matrix, capped_search_config(config, matrix.n_snps()));
  const auto& s = result.stats;
  write_trace_tsv(matrix, result.trace, out_dir / "trace.tsv");
  tsv::Writer out(out_dir / "bench.tsv");
  out.meta("threads", std::to_string(config.threads));
  out.meta("kernel_isa", std::string(kernels::isa_name(kernels::active_isa())));
  out.meta("n", std::to_string(matrix.n_individuals()));
  out.meta("p", std::to_string(matrix.n_snps()));
  out.row({"phase", "seconds", "calls"});
  out.row({"load", tsv::real(load_seconds, 6), "1"});
  out.row({"rank", tsv::real(s.rank_seconds, 6), "3"});
  out.row({"forward", tsv::real(s.forward_seconds, 6), std::to_string(s.forward_scans)});
  out.row({"exchange", tsv::real(s.exchange_seconds, 6), std::to_string(s.exchange_scans)});
  out.row({"backward", tsv::real(s.backward_seconds, 6), std::to_string(s.backward_scans)});
  out.row({"fits", ".", std::to_string(s.fits)});
  out.row({"failed_fits", ".", std::to_string(s.failed_fits)});
  out.row({"accepted_steps", ".", std::to_string(s.accepted_steps)});
  for (const auto& [k, count] : s.fits_by_k) out.row({"fits_k" + std::to_string(k), ".", std::to_string(count)});
  recorder.finish(out_dir);
  return kOk;
}

int run_synth(const RunConfig& config) {
  RunRecorder recorder(config);
  const auto out_dir = require_out(config);
  SyntheticConfig synth;
  synth.n_individuals = config.n_individuals;
  synth.n_snps = config.n_snps;
  synth.n_chromosomes = config.n_chromosomes;
  synth.latent_loading = config.latent_loading;
  synth.seed = config.seed;
  auto matrix = synthesize_genotypes(synth);
  matrix = matrix.with_phenotype(simulate_null(matrix, derive_seed(config.seed, 0)));
  write_plink(matrix, out_dir / "synthetic");
  recorder.finish(out_dir);
  return kOk;
}

void apply_isa(const std::string& isa) {
  if (isa == "auto") {
    kernels::reset_isa();
  } else if (isa == "scalar") {
    kernels::force_isa(kernels::Isa::scalar);
  } else if (isa == "avx2") {
    kernels::force_isa(kernels::Isa::avx2);
  } else {
    throw ArgumentError("unknown --isa '" + isa + "' (auto, scalar, avx2)");
  }
}

struct ErrorKind {
  int code;
  const char* name;
};

ErrorKind classify(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e)) return {kFormat, "format"};
  if (dynamic_cast<const SizeError*>(&e)) return {kSize, "size"};
  if (dynamic_cast<const IoError*>(&e)) return {kIo, "io"};
  if (dynamic_cast<const InfeasibleError*>(&e)) return {kInfeasible, "infeasible"};
  if (dynamic_cast<const DegenerateResponseError*>(&e)) return {kDegenerate, "degenerate_response"};
  if (dynamic_cast<const RankError*>(&e)) return {kNumerical, "rank"};
  if (dynamic_cast<const EmptyResultError*>(&e)) return {kEmptyResult, "empty_result"};
  if (dynamic_cast<const ArgumentError*>(&e)) return {kUsage, "argument"};
  if (dynamic_cast<const ValidationError*>(&e)) return {kValidation, "validation"};
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return {kIo, "io"};
  return {kFailure, "internal"};
}

}  // namespace

int parse_args(int argc, char** argv, RunConfig& config) {
  CLI::App app{"Case-control GWAS model selection with Firth logistic regression and mBIC2"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto io = [&](CLI::App* sub, bool needs_bfile) {
    auto* opt = sub->add_option("--bfile", config.bfile, "PLINK .bed/.bim/.fam prefix");
    if (needs_bfile) opt->required();
    sub->add_option("--out", config.out, "Output directory")->required();
    sub->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
    sub->add_option("--isa", config.isa, "Kernel instruction set: auto, scalar, avx2")->capture_default_str();
    sub->add_option("--seed", config.seed, "Base random seed")->capture_default_str();
  };
  auto qc = [&](CLI::App* sub) {
    sub->add_option("--maf-min", config.maf_min, "Minimum minor allele frequency")->capture_default_str();
    sub->add_option("--hwe-alpha", config.hwe_alpha, "HWE p-value threshold")->capture_default_str();
  };
  auto pheno = [&](CLI::App* sub) {
    sub->add_option("--pheno", config.pheno, ".fam-style file whose 6th column replaces the phenotype");
    sub->add_option("--covar", config.covar, "Covariate table: FID IID c1 .. cK");
  };
  auto search = [&](CLI::App* sub) {
    sub->add_option("--m1", config.m1, "Directed-forward group size")->capture_default_str();
    sub->add_option("--m2", config.m2, "Exchange group size")->capture_default_str();
    sub->add_option("--d", config.d, "Exchange window in markers")->capture_default_str();
  };

  auto* qc_cmd = app.add_subcommand("qc", "Filter SNPs by MAF and Hardy-Weinberg equilibrium");
  io(qc_cmd, true);
  qc(qc_cmd);

  auto* assoc_cmd = app.add_subcommand("assoc", "Single-marker trend tests with Benjamini-Hochberg");
  io(assoc_cmd, true);
  pheno(assoc_cmd);
  assoc_cmd->add_option("--bh-alpha", config.bh_alpha, "BH level")->capture_default_str();

  auto* select_cmd = app.add_subcommand("select", "Three-round stepwise model selection");
  io(select_cmd, true);
  pheno(select_cmd);
  qc(select_cmd);
  search(select_cmd);
  select_cmd->add_option("--sim-dir", config.sim_dir, "Run every replicate of a simulation directory");
  select_cmd->add_option("--bh-alpha", config.bh_alpha, "BH level for the single-marker baseline")
      ->capture_default_str();
  select_cmd->add_flag("--skip-qc", config.skip_qc, "Do not apply MAF/HWE filters");

  auto* null_cmd = app.add_subcommand("simulate-null", "Random case/control labels");
  io(null_cmd, true);
  null_cmd->add_option("--replicates", config.replicates, "Number of replicates")->capture_default_str();

  auto* trait_cmd = app.add_subcommand("simulate-trait", "Logistic complex-trait phenotypes");
  io(trait_cmd, true);
  trait_cmd->add_option("--replicates", config.replicates, "Number of replicates")->capture_default_str();
  trait_cmd->add_option("--k-causal", config.k_causal, "Causal SNP count")->capture_default_str();
  trait_cmd->add_option("--effect-low", config.effect_low, "Smallest effect size")->capture_default_str();
  trait_cmd->add_option("--effect-high", config.effect_high, "Largest effect size")->capture_default_str();
  trait_cmd->add_option("--causal-maf", config.causal_maf, "Causal SNPs need MAF above this")->capture_default_str();
  trait_cmd->add_option("--rho-max", config.rho_max, "Max pairwise |r| among causal SNPs")->capture_default_str();
  bool keep_causal = false;
  trait_cmd->add_flag("--keep-causal", keep_causal, "Do not remove half of the causal SNPs");

  auto* eval_cmd = app.add_subcommand("evaluate", "Power, false positives and FDR over replicates");
  io(eval_cmd, true);
  eval_cmd->add_option("--sim-dir", config.sim_dir, "Simulation directory")->required();
  eval_cmd->add_option("--results", config.results, "Directory with select outputs (default: --sim-dir)");
  eval_cmd->add_option("--cluster-C", config.cluster_c, "Correlation threshold C")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Per-phase timings of one selection run");
  io(bench_cmd, true);
  pheno(bench_cmd);
  search(bench_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic block-LD dataset");
  io(synth_cmd, false);
  synth_cmd->add_option("--n", config.n_individuals, "Individuals")->capture_default_str();
  synth_cmd->add_option("--p", config.n_snps, "SNPs")->capture_default_str();
  synth_cmd->add_option("--chromosomes", config.n_chromosomes, "Chromosomes")->capture_default_str();
  synth_cmd->add_option("--loading", config.latent_loading, "Latent LD loading in [0,1)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? -1 : kUsage;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  config.remove_half = !keep_causal;
  return kOk;
}

int run(const RunConfig& config) {
  try {
    apply_isa(config.isa);
    if (config.threads == 0) throw ArgumentError("--threads must be at least 1");
    const auto& cmd = config.subcommand;
    if (cmd == "qc") return run_qc(config);
    if (cmd == "assoc") return run_assoc(config);
    if (cmd == "select") return run_select(config);
    if (cmd == "simulate-null") return run_simulate(config, false);
    if (cmd == "simulate-trait") return run_simulate(config, true);
    if (cmd == "evaluate") return run_evaluate(config);
    if (cmd == "bench") return run_bench(config);
    if (cmd == "synth") return run_synth(config);
    throw ArgumentError("unknown subcommand '" + cmd + "'");
  } catch (const std::exception& e) {
    const auto kind = classify(e);
    std::cerr << "error\tcode=" << kind.code << "\tkind=" << kind.name << "\tmessage=" << e.what() << '\n';
    return kind.code;
  }
}

int main(int argc, char** argv) {
  RunConfig config;
  const int parsed = parse_args(argc, argv, config);
  if (parsed == -1) return kOk;  // --help / --version
  if (parsed != kOk) return parsed;
  return run(config);
}

}  // namespace gwas::cli
