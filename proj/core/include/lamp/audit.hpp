#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lamp/augment.hpp"
#include "lamp/graph.hpp"

namespace lamp {

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct DamageSample {
  std::size_t graph_index = 0;
  int repeat = 0;
  double percent_change = 0.0;
};

/// Structural-entropy percent changes of one augmentation over a dataset.
struct DamageReport {
  std::string dataset_name;
  Augmentation augmentation = Augmentation::Identity;
  double strength = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::vector<DamageSample> samples;
  std::size_t skipped_edgeless = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t negative_count = 0;
  std::vector<HistogramBin> histogram;
};

/// Fixed 0.05-wide bins over [-1, 1]; values outside are clamped into the end bins.
std::vector<HistogramBin> damage_histogram(const std::vector<DamageSample>& samples);

/// Applies `augmentation` to every graph `repeats` times and records
/// entropy_percent_change. Graph g, repeat r draws from an independent
/// generator seeded by derive_seed(seed, {g, r}). Edgeless graphs are skipped
/// and counted.
DamageReport audit_dataset(const Dataset& dataset, Augmentation augmentation, double strength,
                           int repeats, std::uint64_t seed);

/// `graph_index,repeat,percent_change`
std::string damage_csv(const DamageReport& report);
/// mean/std/min/max/histogram summary.
std::string damage_summary_json(const DamageReport& report);

}  // namespace lamp
