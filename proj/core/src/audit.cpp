#include "lamp/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lamp/entropy.hpp"
#include "lamp/error.hpp"
#include "lamp/io.hpp"

namespace lamp {

namespace {
constexpr double kBinWidth = 0.05;
constexpr int kBins = 40;
}  // namespace

std::vector<HistogramBin> damage_histogram(const std::vector<DamageSample>& samples) {
  std::vector<HistogramBin> bins(kBins);
  for (int b = 0; b < kBins; ++b) {
    bins[b].lo = -1.0 + b * kBinWidth;
    bins[b].hi = -1.0 + (b + 1) * kBinWidth;
  }
  for (const DamageSample& s : samples) {
    int b = static_cast<int>(std::floor((s.percent_change + 1.0) / kBinWidth));
    ++bins[std::clamp(b, 0, kBins - 1)].count;
  }
  return bins;
}

DamageReport audit_dataset(const Dataset& dataset, Augmentation augmentation, double strength,
                           int repeats, std::uint64_t seed) {
  if (repeats < 1) throw ArgumentError("audit_dataset: repeats must be >= 1");
  if (!(strength >= 0.0 && strength < 1.0)) {
    throw ArgumentError("audit_dataset: strength must lie in [0, 1)");
  }
  DamageReport report;
  report.dataset_name = dataset.name;
  report.augmentation = augmentation;
  report.strength = strength;
  report.repeats = repeats;
  report.seed = seed;

  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    const Graph& graph = dataset.graphs[g];
    if (graph.edge_count() == 0) {
      ++report.skipped_edgeless;
      continue;
    }
    for (int r = 0; r < repeats; ++r) {
      Rng rng(derive_seed(seed, {g, static_cast<std::uint64_t>(r)}));
      const Graph aug = augment(graph, augmentation, strength, rng);
      report.samples.push_back({g, r, entropy_percent_change(graph, aug)});
    }
  }

  if (!report.samples.empty()) {
    double sum = 0.0;
    report.min = report.samples.front().percent_change;
    report.max = report.min;
    for (const auto& s : report.samples) {
      sum += s.percent_change;
      report.min = std::min(report.min, s.percent_change);
      report.max = std::max(report.max, s.percent_change);
      if (s.percent_change < 0.0) ++report.negative_count;
    }
    report.mean = sum / static_cast<double>(report.samples.size());
    double ss = 0.0;
    for (const auto& s : report.samples) ss += (s.percent_change - report.mean) * (s.percent_change - report.mean);
    report.std = std::sqrt(ss / static_cast<double>(report.samples.size()));
  }
  report.histogram = damage_histogram(report.samples);
  return report;
}

std::string damage_csv(const DamageReport& report) {
  std::ostringstream out;
  out << "graph_index,repeat,percent_change\n";
  for (const auto& s : report.samples) {
    out << s.graph_index << ',' << s.repeat << ',' << format_double(s.percent_change) << '\n';
  }
  return out.str();
}

std::string damage_summary_json(const DamageReport& report) {
  nlohmann::json j;
  j["dataset"] = report.dataset_name;
  j["augmentation"] = std::string(to_string(report.augmentation));
  j["strength"] = report.strength;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  j["samples"] = report.samples.size();
  j["skipped_edgeless"] = report.skipped_edgeless;
  j["negative_count"] = report.negative_count;
  j["mean"] = report.mean;
  j["std"] = report.std;
  j["min"] = report.min;
  j["max"] = report.max;
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : report.histogram) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  j["histogram"] = std::move(bins);
  return j.dump(2);
}

}  // namespace lamp
