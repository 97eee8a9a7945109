#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

#include "gwas/errors.hpp"
#include "gwas/genotype.hpp"

namespace gwas {

namespace {

constexpr std::uint8_t kMagic0 = 0x6C;
constexpr std::uint8_t kMagic1 = 0x1B;
constexpr std::uint8_t kSnpMajor = 0x01;

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

template <class T>
T parse_number(const std::string& token, const std::string& what) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw FormatError("cannot parse " + what + " from '" + token + "'");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::vector<SnpMeta> read_bim(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<SnpMeta> snps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 6) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
    }
    SnpMeta meta;
    meta.chromosome = parse_chromosome(tokens[0]);
    meta.snp_id = tokens[1];
    meta.position_cm = std::stod(tokens[2]);
    meta.position_bp = parse_number<std::int64_t>(tokens[3], "base-pair position");
    meta.allele_a = tokens[4];
    meta.allele_b = tokens[5];
    if (meta.allele_a == meta.allele_b || meta.allele_a.find(',') != std::string::npos ||
        meta.allele_b.find(',') != std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": SNP " + meta.snp_id +
                            " is not biallelic");
    }
    snps.push_back(std::move(meta));
  }
  return snps;
}

std::int8_t label_from_fam(const std::string& token) {
  if (token == "2") return 1;
  if (token == "1") return 0;
  return -1;
}

void read_fam(const std::filesystem::path& path, std::vector<Individual>& people, PhenotypeLabels& labels) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 6) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
    }
    Individual person;
    person.family_id = tokens[0];
    person.individual_id = tokens[1];
    person.father_id = tokens[2];
    person.mother_id = tokens[3];
    person.sex = tokens[4] == "1" ? 1 : (tokens[4] == "2" ? 2 : 0);
    people.push_back(std::move(person));
    labels.push_back(label_from_fam(tokens[5]));
  }
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string chromosome_name(int chromosome) {
  switch (chromosome) {
    case 23:
      return "X";
    case 24:
      return "Y";
    case 25:
      return "XY";
    case 26:
      return "MT";
    default:
      return std::to_string(chromosome);
  }
}

void write_fam_rows(const GenotypeMatrix& matrix, std::ostream& out) {
  const auto& people = matrix.individuals();
  for (std::size_t i = 0; i < matrix.n_individuals(); ++i) {
    const auto& p = people[i];
    const char* pheno = "-9";
    if (matrix.has_phenotype()) {
      const auto label = matrix.phenotype()[i];
      pheno = label == 1 ? "2" : (label == 0 ? "1" : "-9");
    }
    out << p.family_id << ' ' << p.individual_id << ' ' << p.father_id << ' ' << p.mother_id << ' ' << p.sex << ' '
        << pheno << '\n';
  }
}

}  // namespace

int parse_chromosome(const std::string& token) {
  std::string t = token;
  if (t.size() > 3 && (t.rfind("chr", 0) == 0 || t.rfind("CHR", 0) == 0)) t = t.substr(3);
  if (t == "X") return 23;
  if (t == "Y") return 24;
  if (t == "XY") return 25;
  if (t == "MT" || t == "M") return 26;
  const int value = parse_number<int>(t, "chromosome");
  if (value < 0) throw FormatError("negative chromosome code '" + token + "'");
  return value;
}

GenotypeMatrix load_plink(const std::filesystem::path& bed, const std::filesystem::path& bim,
                          const std::filesystem::path& fam) {
  auto snps = read_bim(bim);
  std::vector<Individual> people;
  PhenotypeLabels labels;
  read_fam(fam, people, labels);
  const std::size_t n = people.size();
  const std::size_t p = snps.size();
  const std::size_t row_bytes = (n + 3) / 4;

  auto in = open_input(bed, std::ios::in | std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 3 || bytes[0] != kMagic0 || bytes[1] != kMagic1) {
    throw FormatError(bed.string() + ": not a PLINK .bed file (bad magic bytes)");
  }
  if (bytes[2] != kSnpMajor) throw FormatError(bed.string() + ": only SNP-major mode (0x01) is supported");
  if (bytes.size() != 3 + p * row_bytes) {
    throw SizeError(bed.string() + ": size " + std::to_string(bytes.size()) + " != 3 + " + std::to_string(p) +
                    " * " + std::to_string(row_bytes));
  }

  // Sort by (chromosome, position) and drop later duplicates of a position.
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    return std::tie(snps[a].chromosome, snps[a].position_bp) < std::tie(snps[b].chromosome, snps[b].position_bp);
  });
  std::vector<std::size_t> kept;
  kept.reserve(p);
  for (std::size_t j : order) {
    if (!kept.empty() && snps[kept.back()].chromosome == snps[j].chromosome &&
        snps[kept.back()].position_bp == snps[j].position_bp) {
      continue;
    }
    kept.push_back(j);
  }

  std::vector<std::uint8_t> packed;
  std::vector<SnpMeta> ordered;
  if (kept.size() == p && std::ranges::is_sorted(kept)) {
    packed.assign(bytes.begin() + 3, bytes.end());
    ordered = std::move(snps);
  } else {
    packed.reserve(kept.size() * row_bytes);
    for (std::size_t j : kept) {
      const auto first = bytes.begin() + 3 + static_cast<std::ptrdiff_t>(j * row_bytes);
      packed.insert(packed.end(), first, first + static_cast<std::ptrdiff_t>(row_bytes));
      ordered.push_back(std::move(snps[j]));
    }
  }

  std::optional<PhenotypeLabels> phenotype;
  if (std::ranges::any_of(labels, [](std::int8_t v) { return v != -1; })) phenotype = std::move(labels);
  return GenotypeMatrix(n, std::move(ordered), std::move(packed), std::move(people), std::move(phenotype));
}

GenotypeMatrix load_plink(const std::filesystem::path& prefix) {
  const std::string base = prefix.string();
  return load_plink(base + ".bed", base + ".bim", base + ".fam");
}

void write_plink(const GenotypeMatrix& matrix, const std::filesystem::path& prefix) {
  if (matrix.n_individuals() == 0 || matrix.n_snps() == 0) {
    throw ValidationError("refusing to write a degenerate dataset with no individuals or no SNPs");
  }
  const std::string base = prefix.string();
  {
    auto out = open_output(base + ".bed", std::ios::out | std::ios::binary);
    const char header[3] = {static_cast<char>(kMagic0), static_cast<char>(kMagic1), static_cast<char>(kSnpMajor)};
    out.write(header, 3);
    const auto payload = matrix.packed_data();
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError("failed writing " + base + ".bed");
  }
  {
    auto out = open_output(base + ".bim");
    for (const auto& s : matrix.snps()) {
      out << chromosome_name(s.chromosome) << '\t' << s.snp_id << '\t' << s.position_cm << '\t' << s.position_bp
          << '\t' << s.allele_a << '\t' << s.allele_b << '\n';
    }
    if (!out) throw IoError("failed writing " + base + ".bim");
  }
  write_fam(matrix, base + ".fam");
}

void write_fam(const GenotypeMatrix& matrix, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_fam_rows(matrix, out);
  if (!out) throw IoError("failed writing " + path.string());
}

PhenotypeLabels read_fam_phenotype(const std::filesystem::path& path, std::size_t expected_rows) {
  std::vector<Individual> people;
  PhenotypeLabels labels;
  read_fam(path, people, labels);
  if (labels.size() != expected_rows) {
    throw ValidationError(path.string() + ": expected " + std::to_string(expected_rows) + " rows, found " +
                          std::to_string(labels.size()));
  }
  return labels;
}

Eigen::MatrixXd read_covariates(const std::filesystem::path& path, const GenotypeMatrix& matrix) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "FID" || tokens[0] == "#FID") continue;
    if (tokens.size() < 3) throw FormatError(path.string() + ": covariate rows need FID IID and values");
    const std::size_t row = rows.size();
    if (row >= matrix.n_individuals()) throw ValidationError(path.string() + ": more rows than individuals");
    const auto& person = matrix.individuals()[row];
    if (tokens[0] != person.family_id || tokens[1] != person.individual_id) {
      throw ValidationError(path.string() + ": row " + std::to_string(row + 1) + " does not match .fam order");
    }
    if (width == 0) width = tokens.size() - 2;
    if (tokens.size() - 2 != width) throw FormatError(path.string() + ": ragged covariate rows");
    std::vector<double> values;
    for (std::size_t t = 2; t < tokens.size(); ++t) values.push_back(std::stod(tokens[t]));
    rows.push_back(std::move(values));
  }
  if (rows.size() != matrix.n_individuals()) throw ValidationError(path.string() + ": row count mismatch");
  Eigen::MatrixXd covariates(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) covariates(i, c) = rows[i][c];
  }
  return covariates;
}

}  // namespace gwas
