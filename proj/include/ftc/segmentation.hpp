#pragma once

#include "ftc/fields.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace ftc {

struct RegionRecord {
  int label = 0;
  int seed_i = 0;
  int seed_j = 0;
  std::size_t cells = 0;
  /// Mean of the (transformed) values the region was grown on.
  double mean = 0.0;
  int i_min = 0, i_max = 0, j_min = 0, j_max = 0;
  std::optional<double> alpha;
};

/// Label grid (0 = unassigned) with one record per label 1..K, records[k].label == k + 1.
struct RegionPartition {
  GridSpec spec;
  std::vector<int> labels;
  std::vector<RegionRecord> regions;

  int label(int i, int j) const { return labels[static_cast<std::size_t>(j) * spec.nx + i]; }
  std::size_t assigned() const;
  const RegionRecord& region(int label) const { return regions.at(label - 1); }

  /// Labels as an FTCGRID-ready field (integer values, metadata copied from `meta`).
  FieldGrid to_field(const std::map<std::string, std::string>& meta = {}) const;
  static RegionPartition from_field(const FieldGrid& labels);
};

enum class ValueTransform { none, log10 };

struct GrowingSettings {
  int n_seeds = 100;
  /// Largest admissible |value - region mean|, in transformed units.
  double threshold = 0.25;
  ValueTransform transform = ValueTransform::log10;
};

/// Seed cells on a near-square lattice: mx = ceil(sqrt(n)) columns, ceil(n / mx) rows,
/// first n in row-major order. Throws ConfigError when the grid is too small.
std::vector<std::pair<int, int>> seed_lattice(const GridSpec& spec, int n_seeds);

/// Seeded region growing with a single global priority queue keyed by
/// (|value - region mean|, label, row-major cell index). Seeds enter the queue at key
/// (0, seed order) and open a region only if their cell is still free when popped, so
/// seeds swallowed by an earlier region at zero cost do not produce regions.
/// Masked or non-transformable cells stay 0.
RegionPartition seeded_region_growing(const FieldGrid& field, const GrowingSettings& settings = {});

/// Folds regions smaller than `min_cells` into the 4-adjacent region with the closest mean,
/// smallest first (ties by label). Regions without a neighbor are kept. Labels are
/// renumbered compactly in order of their smallest old label.
RegionPartition merge_small_regions(const RegionPartition& partition, std::size_t min_cells);

/// Cells of each region counted by flood fill; true when every region is one
/// 4-connected component matching its record.
bool regions_connected(const RegionPartition& partition);

/// CSV: label,seed_x,seed_y,cells,mean[,alpha].
void write_region_table(std::ostream& out, const RegionPartition& partition);

}  // namespace ftc
