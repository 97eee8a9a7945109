#include "gwas/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwas/errors.hpp"

namespace gwas {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void canonicalize(std::vector<std::size_t>& snps) {
  std::ranges::sort(snps);
  snps.erase(std::unique(snps.begin(), snps.end()), snps.end());
}

double abs_r(CorrelationCache& cache, std::size_t a, std::size_t b) {
  const auto r = cache(a, b);
  return r ? std::abs(*r) : 0.0;
}

}  // namespace

ClusterSet c_cluster(const GenotypeMatrix& matrix, std::vector<std::size_t> detections, double threshold_c) {
  if (!(threshold_c > 0.0 && threshold_c < 1.0)) throw ArgumentError("cluster threshold must lie in (0, 1)");
  canonicalize(detections);
  CorrelationCache cache(matrix);
  ClusterSet result;
  result.threshold_c = threshold_c;
  std::vector<bool> assigned(detections.size(), false);
  for (std::size_t s = 0; s < detections.size(); ++s) {
    if (assigned[s]) continue;
    std::vector<std::size_t> cluster{detections[s]};
    assigned[s] = true;
    for (std::size_t t = s + 1; t < detections.size(); ++t) {
      if (assigned[t]) continue;
      const bool joins = std::ranges::all_of(
          cluster, [&](std::size_t member) { return abs_r(cache, member, detections[t]) > threshold_c; });
      if (joins) {
        cluster.push_back(detections[t]);
        assigned[t] = true;
      }
    }
    result.clusters.push_back(std::move(cluster));
  }
  return result;
}

TruePositiveMatch match_true_positives(const GenotypeMatrix& matrix, std::vector<std::size_t> detections,
                                       const std::vector<std::size_t>& causal, double threshold_c) {
  canonicalize(detections);
  auto causal_sorted = causal;
  canonicalize(causal_sorted);
  CorrelationCache cache(matrix);
  TruePositiveMatch match;
  std::vector<bool> hit(causal_sorted.size(), false);
  for (std::size_t d : detections) {
    std::size_t best = kNone;
    double best_r = 0.0;
    for (std::size_t c = 0; c < causal_sorted.size(); ++c) {
      const double r = d == causal_sorted[c] ? 1.0 : abs_r(cache, d, causal_sorted[c]);
      if (r > threshold_c && (best == kNone || r > best_r)) {
        best = c;
        best_r = r;
      }
    }
    if (best == kNone) {
      match.false_positives.push_back(d);
      match.assigned_causal.push_back(kNone);
    } else {
      hit[best] = true;
      match.assigned_causal.push_back(causal_sorted[best]);
    }
  }
  match.true_positives = static_cast<std::size_t>(std::ranges::count(hit, true));
  return match;
}

EvalReport evaluate_replicate(const GenotypeMatrix& matrix, const std::vector<std::size_t>& detections,
                              const Scenario& scenario, double threshold_c, bool cluster_fp) {
  auto canonical = detections;
  canonicalize(canonical);
  const auto match = match_true_positives(matrix, canonical, scenario.causal_snps, threshold_c);
  EvalReport report;
  report.threshold_c = threshold_c;
  report.size = canonical.size();
  report.k_causal = scenario.causal_snps.size();
  report.true_positives = match.true_positives;
  report.fp = cluster_fp ? static_cast<double>(c_cluster(matrix, match.false_positives, threshold_c).clusters.size())
                         : static_cast<double>(match.false_positives.size());
  report.power = report.k_causal > 0 ? static_cast<double>(report.true_positives) / report.k_causal : 0.0;
  const double found = static_cast<double>(report.true_positives) + report.fp;
  report.fdr = found > 0.0 ? report.fp / found : 0.0;
  report.misclassifications = report.fp + static_cast<double>(report.k_causal - report.true_positives);
  return report;
}

EvalSummary aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ArgumentError("aggregate needs at least one report");
  const double count = static_cast<double>(reports.size());
  auto mean_se = [&](auto field, double& mean, double& se) {
    double sum = 0.0;
    for (const auto& r : reports) sum += field(r);
    mean = sum / count;
    double ss = 0.0;
    for (const auto& r : reports) ss += (field(r) - mean) * (field(r) - mean);
    se = reports.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  };
  EvalSummary s;
  s.replicates = reports.size();
  mean_se([](const EvalReport& r) { return static_cast<double>(r.size); }, s.size, s.size_se);
  mean_se([](const EvalReport& r) { return r.power; }, s.power, s.power_se);
  mean_se([](const EvalReport& r) { return r.fp; }, s.fp, s.fp_se);
  mean_se([](const EvalReport& r) { return r.fdr; }, s.fdr, s.fdr_se);
  mean_se([](const EvalReport& r) { return r.misclassifications; }, s.misclassifications, s.misclassifications_se);
  return s;
}

}  // namespace gwas
