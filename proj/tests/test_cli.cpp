#include <doctest.h>

#include <json.hpp>
#include <map>
#include <sstream>

#include "gwas/cli.hpp"
#include "gwas/genotype.hpp"
#include "support.hpp"

using namespace gwas;
using cli::RunConfig;

namespace {

const std::string kData = GWAS_DATA_DIR "/example";

RunConfig base(const std::string& subcommand, const testing::fs::path& out) {
  RunConfig c;
  c.subcommand = subcommand;
  c.bfile = kData;
  c.out = out.string();
  return c;
}

int parse(std::vector<std::string> args, RunConfig& config) {
  args.insert(args.begin(), "gwas-select");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::parse_args(static_cast<int>(argv.size()), argv.data(), config);
}

// Rows of a TSV without '#' metadata lines.
std::vector<std::string> rows(const testing::fs::path& path) {
  std::istringstream in(testing::slurp(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("select on the bundled dataset is reproducible") {
  testing::TempDir dir;
  REQUIRE(cli::run(base("select", dir / "a")) == cli::kOk);
  REQUIRE(cli::run(base("select", dir / "b")) == cli::kOk);
  for (const char* file : {"model.tsv", "trace.tsv"}) {
    CHECK(testing::slurp(dir / "a" / file) == testing::slurp(dir / "b" / file));
  }
  const auto model = rows(dir / "a" / "model.tsv");
  REQUIRE(model.size() >= 2);
  CHECK(model[0] == "snp_id\tchrom\tpos\tcoefficient");
  // The planted signal on chromosome 1 is found.
  bool found = false;
  for (const auto& row : model) found = found || row.rfind("snp42\t", 0) == 0;
  CHECK(found);

  const auto manifest = nlohmann::json::parse(testing::slurp(dir / "a" / "manifest.json"));
  CHECK(manifest.contains("version"));
  CHECK(manifest["config"]["subcommand"] == "select");
  CHECK(manifest["config"]["m1"] == 350);
  CHECK(manifest["inputs"].size() == 3);
  CHECK(manifest["wall_clock_seconds"].get<double>() >= 0.0);
  CHECK(manifest.contains("kernel_isa"));
}

TEST_CASE("thread count does not change outputs") {
  testing::TempDir dir;
  auto one = base("select", dir / "one");
  auto eight = base("select", dir / "eight");
  eight.threads = 8;
  REQUIRE(cli::run(one) == cli::kOk);
  REQUIRE(cli::run(eight) == cli::kOk);
  CHECK(testing::slurp(dir / "one" / "model.tsv") == testing::slurp(dir / "eight" / "model.tsv"));
  CHECK(testing::slurp(dir / "one" / "trace.tsv") == testing::slurp(dir / "eight" / "trace.tsv"));

  auto assoc1 = base("assoc", dir / "assoc1");
  auto assoc8 = base("assoc", dir / "assoc8");
  assoc8.threads = 8;
  REQUIRE(cli::run(assoc1) == cli::kOk);
  REQUIRE(cli::run(assoc8) == cli::kOk);
  CHECK(testing::slurp(dir / "assoc1" / "assoc.tsv") == testing::slurp(dir / "assoc8" / "assoc.tsv"));
}

TEST_CASE("qc writes a report and a filtered fileset") {
  testing::TempDir dir;
  REQUIRE(cli::run(base("qc", dir / "qc")) == cli::kOk);
  CHECK(testing::fs::exists(dir / "qc" / "qc_report.tsv"));
  const auto filtered = load_plink(dir / "qc" / "qc");
  CHECK(filtered.n_snps() <= 400);
  CHECK(filtered.n_individuals() == 300);
}

TEST_CASE("simulate, select, evaluate pipeline") {
  testing::TempDir dir;
  auto sim = base("simulate-trait", dir / "sim");
  sim.replicates = 2;
  sim.k_causal = 2;
  sim.effect_low = 1.0;
  sim.effect_high = 1.0;
  sim.remove_half = false;
  REQUIRE(cli::run(sim) == cli::kOk);
  auto select = base("select", dir / "sel");
  select.sim_dir = (dir / "sim").string();
  REQUIRE(cli::run(select) == cli::kOk);
  CHECK(testing::fs::exists(dir / "sel" / "rep_0001" / "single_marker.tsv"));
  auto eval = base("evaluate", dir / "eval");
  eval.sim_dir = (dir / "sim").string();
  eval.results = (dir / "sel").string();
  REQUIRE(cli::run(eval) == cli::kOk);
  const auto summary = rows(dir / "eval" / "summary.tsv");
  REQUIRE(summary.size() == 6);
  CHECK(summary[0] == "metric\tMOS\tMOS_se\tSM\tSM_se");
  CHECK(summary[2].rfind("Power\t", 0) == 0);
  CHECK(rows(dir / "eval" / "evaluation.tsv").size() == 5);

  auto null = base("simulate-null", dir / "null");
  null.replicates = 3;
  REQUIRE(cli::run(null) == cli::kOk);
  CHECK(testing::fs::exists(dir / "null" / "rep_0002" / "pheno.fam"));
}

TEST_CASE("bench counts are consistent with the trace") {
  testing::TempDir dir;
  REQUIRE(cli::run(base("bench", dir / "bench")) == cli::kOk);
  std::map<std::string, std::string> calls;
  for (const auto& row : rows(dir / "bench" / "bench.tsv")) {
    std::istringstream in(row);
    std::string phase, seconds, count;
    in >> phase >> seconds >> count;
    calls[phase] = count;
  }
  const auto trace = rows(dir / "bench" / "trace.tsv");
  // Header plus one start record per round.
  const std::size_t accepted = trace.size() - 4;
  CHECK(std::stoul(calls.at("accepted_steps")) == accepted);
  CHECK(std::stoul(calls.at("fits")) >= accepted);
  std::size_t by_k = 0;
  for (const auto& [phase, count] : calls) {
    if (phase.rfind("fits_k", 0) == 0) by_k += std::stoul(count);
  }
  CHECK(by_k == std::stoul(calls.at("fits")));
}

TEST_CASE("synth writes a PLINK fileset") {
  testing::TempDir dir;
  auto c = base("synth", dir / "syn");
  c.n_individuals = 40;
  c.n_snps = 30;
  c.n_chromosomes = 2;
  REQUIRE(cli::run(c) == cli::kOk);
  const auto m = load_plink(dir / "syn" / "synthetic");
  CHECK(m.n_individuals() == 40);
  CHECK(m.n_snps() == 30);
}

TEST_CASE("errors map to distinct exit codes") {
  testing::TempDir dir;
  auto missing = base("select", dir / "x");
  missing.bfile = (dir / "nope").string();
  CHECK(cli::run(missing) == cli::kIo);

  for (const char* ext : {".bim", ".fam"}) {
    testing::fs::copy_file(kData + ext, dir / (std::string("bad") + ext));
  }
  auto bytes = testing::slurp(kData + ".bed");
  bytes[0] = 0x00;
  testing::spit(dir / "bad.bed", bytes);
  auto bad = base("select", dir / "y");
  bad.bfile = (dir / "bad").string();
  CHECK(cli::run(bad) == cli::kFormat);

  auto infeasible = base("simulate-trait", dir / "z");
  infeasible.causal_maf = 0.5;
  CHECK(cli::run(infeasible) == cli::kInfeasible);

  auto threads = base("select", dir / "w");
  threads.threads = 0;
  CHECK(cli::run(threads) == cli::kUsage);

  auto unknown = base("frobnicate", dir / "v");
  CHECK(cli::run(unknown) == cli::kUsage);
}

TEST_CASE("argument parsing") {
  RunConfig c;
  CHECK(parse({"select", "--bfile", "x", "--out", "y", "--m1", "100", "--threads", "3"}, c) == cli::kOk);
  CHECK(c.subcommand == "select");
  CHECK(c.m1 == 100);
  CHECK(c.threads == 3);
  CHECK(c.m2 == 5000);
  CHECK(c.d == 50);
  CHECK(c.cluster_c == 0.3);
  CHECK(c.maf_min == 0.01);
  CHECK(c.hwe_alpha == 1e-4);
  CHECK(c.bh_alpha == 0.05);

  RunConfig d;
  CHECK(parse({"select", "--no-such-flag"}, d) == cli::kUsage);
  RunConfig e;
  CHECK(parse({}, e) == cli::kUsage);
  RunConfig f;
  CHECK(parse({"simulate-trait", "--bfile", "x", "--out", "y", "--keep-causal"}, f) == cli::kOk);
  CHECK_FALSE(f.remove_half);
}
