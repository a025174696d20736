#include "ftc/segmentation.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>

namespace ftc {

namespace {

struct Candidate {
  double diff;
  int order;  // region label, or seed ordinal for seed entries
  std::size_t cell;
  bool seed;
};

struct CandidateAfter {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.diff != b.diff) return a.diff > b.diff;
    if (a.order != b.order) return a.order > b.order;
    return a.cell > b.cell;
  }
};

template <typename Fn>
void for_neighbors(const GridSpec& spec, std::size_t k, Fn&& fn) {
  const int i = static_cast<int>(k % spec.nx);
  const int j = static_cast<int>(k / spec.nx);
  if (j > 0) fn(k - spec.nx);
  if (i > 0) fn(k - 1);
  if (i + 1 < spec.nx) fn(k + 1);
  if (j + 1 < spec.ny) fn(k + spec.nx);
}

void rebuild_records(RegionPartition& p, const std::vector<double>& values,
                     const std::vector<std::pair<int, int>>& seeds) {
  for (std::size_t r = 0; r < p.regions.size(); ++r) {
    auto& rec = p.regions[r];
    rec.label = static_cast<int>(r) + 1;
    rec.cells = 0;
    rec.mean = 0.0;
    rec.seed_i = seeds[r].first;
    rec.seed_j = seeds[r].second;
    rec.i_min = rec.j_min = std::numeric_limits<int>::max();
    rec.i_max = rec.j_max = std::numeric_limits<int>::min();
  }
  std::vector<double> sums(p.regions.size(), 0.0);
  for (std::size_t k = 0; k < p.labels.size(); ++k) {
    const int l = p.labels[k];
    if (l == 0) continue;
    auto& rec = p.regions[l - 1];
    const int i = static_cast<int>(k % p.spec.nx), j = static_cast<int>(k / p.spec.nx);
    ++rec.cells;
    sums[l - 1] += values[k];
    rec.i_min = std::min(rec.i_min, i);
    rec.i_max = std::max(rec.i_max, i);
    rec.j_min = std::min(rec.j_min, j);
    rec.j_max = std::max(rec.j_max, j);
  }
  for (std::size_t r = 0; r < p.regions.size(); ++r)
    if (p.regions[r].cells) p.regions[r].mean = sums[r] / static_cast<double>(p.regions[r].cells);
}

}  // namespace

std::size_t RegionPartition::assigned() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](int l) { return l != 0; }));
}

FieldGrid RegionPartition::to_field(const std::map<std::string, std::string>& meta) const {
  FieldGrid f(spec);
  for (std::size_t k = 0; k < labels.size(); ++k) f.set(k, labels[k]);
  f.meta = meta;
  return f;
}

RegionPartition RegionPartition::from_field(const FieldGrid& labels) {
  RegionPartition p;
  p.spec = labels.spec();
  p.labels.assign(labels.size(), 0);
  int max_label = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (!labels.valid(k)) continue;
    const double v = labels.values()[k];
    if (v < 0 || v != std::floor(v)) throw ConfigError("label grid holds a non-label value");
    p.labels[k] = static_cast<int>(v);
    max_label = std::max(max_label, p.labels[k]);
  }
  p.regions.resize(max_label);
  std::vector<std::pair<int, int>> seeds(max_label, {-1, -1});
  for (std::size_t k = 0; k < p.labels.size(); ++k) {
    const int l = p.labels[k];
    if (l && seeds[l - 1].first < 0)
      seeds[l - 1] = {static_cast<int>(k % p.spec.nx), static_cast<int>(k / p.spec.nx)};
  }
  rebuild_records(p, std::vector<double>(p.labels.size(), 0.0), seeds);
  return p;
}

std::vector<std::pair<int, int>> seed_lattice(const GridSpec& spec, int n_seeds) {
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  const int mx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_seeds)) - 1e-9));
  const int my = (n_seeds + mx - 1) / mx;
  if (spec.nx < mx || spec.ny < my)
    throw ConfigError("grid " + std::to_string(spec.nx) + "x" + std::to_string(spec.ny) +
                      " too small for a " + std::to_string(mx) + "x" + std::to_string(my) +
                      " seed lattice");
  std::vector<std::pair<int, int>> seeds;
  for (int b = 0; b < my; ++b)
    for (int a = 0; a < mx && static_cast<int>(seeds.size()) < n_seeds; ++a)
      seeds.emplace_back(static_cast<int>((a + 0.5) * spec.nx / mx),
                         static_cast<int>((b + 0.5) * spec.ny / my));
  return seeds;
}

RegionPartition seeded_region_growing(const FieldGrid& field, const GrowingSettings& settings) {
  if (!(settings.threshold > 0.0)) throw ConfigError("threshold must be > 0");
  const GridSpec& spec = field.spec();
  const auto seeds = seed_lattice(spec, settings.n_seeds);

  std::vector<double> values(field.size());
  std::vector<std::uint8_t> usable(field.size(), 0);
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (!field.valid(k)) continue;
    double v = field.values()[k];
    if (settings.transform == ValueTransform::log10) {
      if (!(v > 0.0)) continue;
      v = std::log10(v);
    }
    if (!std::isfinite(v)) continue;
    values[k] = v;
    usable[k] = 1;
  }

  RegionPartition p;
  p.spec = spec;
  p.labels.assign(field.size(), 0);
  // Running means, updated incrementally so a constant region keeps its mean bit-exact.
  std::vector<double> means;
  std::vector<std::size_t> counts;
  std::vector<std::pair<int, int>> region_seeds;

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> queue;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const std::size_t k = field.index(seeds[s].first, seeds[s].second);
    if (usable[k]) queue.push({0.0, static_cast<int>(s) + 1, k, true});
  }

  auto admit = [&](std::size_t k, int label) {
    p.labels[k] = label;
    const double n = static_cast<double>(++counts[label - 1]);
    double& mean = means[label - 1];
    mean += (values[k] - mean) / n;
    for_neighbors(spec, k, [&](std::size_t n) {
      if (usable[n] && p.labels[n] == 0) queue.push({std::abs(values[n] - mean), label, n, false});
    });
  };

  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    if (p.labels[c.cell] != 0) continue;
    if (c.seed) {
      means.push_back(0.0);
      counts.push_back(0);
      region_seeds.emplace_back(static_cast<int>(c.cell % spec.nx), static_cast<int>(c.cell / spec.nx));
      admit(c.cell, static_cast<int>(means.size()));
      continue;
    }
    const double d = std::abs(values[c.cell] - means[c.order - 1]);
    if (d > c.diff) {
      // The region mean drifted away since this entry was queued.
      queue.push({d, c.order, c.cell, false});
      continue;
    }
    if (d > settings.threshold) continue;
    admit(c.cell, c.order);
  }

  p.regions.resize(means.size());
  rebuild_records(p, values, region_seeds);
  return p;
}

RegionPartition merge_small_regions(const RegionPartition& partition, std::size_t min_cells) {
  if (min_cells < 1) throw ConfigError("min_cells must be >= 1");
  RegionPartition p = partition;
  const std::size_t n = p.regions.size();
  // Weighted means let merged records stay exact without the source values.
  std::vector<double> sums(n);
  std::vector<std::size_t> counts(n);
  std::vector<int> alias(n);
  for (std::size_t r = 0; r < n; ++r) {
    counts[r] = p.regions[r].cells;
    sums[r] = p.regions[r].mean * static_cast<double>(counts[r]);
    alias[r] = static_cast<int>(r) + 1;
  }
  std::vector<std::uint8_t> stuck(n, 0);

  while (true) {
    int victim = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (counts[r] == 0 || counts[r] >= min_cells || stuck[r]) continue;
      if (victim == 0 || counts[r] < counts[victim - 1]) victim = static_cast<int>(r) + 1;
    }
    if (victim == 0) break;

    std::map<int, bool> neighbors;
    for (std::size_t k = 0; k < p.labels.size(); ++k) {
      if (p.labels[k] != victim) continue;
      for_neighbors(p.spec, k, [&](std::size_t m) {
        const int l = p.labels[m];
        if (l != 0 && l != victim) neighbors[l] = true;
      });
    }
    if (neighbors.empty()) {
      stuck[victim - 1] = 1;
      continue;
    }
    const double vmean = sums[victim - 1] / static_cast<double>(counts[victim - 1]);
    int target = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [l, _] : neighbors) {
      const double d = std::abs(sums[l - 1] / static_cast<double>(counts[l - 1]) - vmean);
      if (d < best) {
        best = d;
        target = l;
      }
    }
    for (auto& l : p.labels)
      if (l == victim) l = target;
    sums[target - 1] += sums[victim - 1];
    counts[target - 1] += counts[victim - 1];
    sums[victim - 1] = 0.0;
    counts[victim - 1] = 0;
  }

  std::vector<int> remap(n + 1, 0);
  std::vector<RegionRecord> kept;
  std::vector<double> kept_means;
  for (std::size_t r = 0; r < n; ++r) {
    if (counts[r] == 0) continue;
    kept.push_back(p.regions[r]);
    kept_means.push_back(sums[r] / static_cast<double>(counts[r]));
    remap[r + 1] = static_cast<int>(kept.size());
  }
  for (auto& l : p.labels) l = remap[l];
  std::vector<std::pair<int, int>> seeds;
  for (const auto& rec : kept) seeds.emplace_back(rec.seed_i, rec.seed_j);
  p.regions = std::move(kept);
  rebuild_records(p, std::vector<double>(p.labels.size(), 0.0), seeds);
  for (std::size_t r = 0; r < p.regions.size(); ++r) p.regions[r].mean = kept_means[r];
  return p;
}

bool regions_connected(const RegionPartition& p) {
  std::vector<std::uint8_t> seen(p.labels.size(), 0);
  std::vector<std::uint8_t> label_seen(p.regions.size() + 1, 0);
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k < p.labels.size(); ++k) {
    const int l = p.labels[k];
    if (l == 0 || seen[k]) continue;
    if (l < 0 || l > static_cast<int>(p.regions.size()) || label_seen[l]) return false;
    label_seen[l] = 1;
    std::size_t count = 0;
    stack.assign(1, k);
    seen[k] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++count;
      for_neighbors(p.spec, c, [&](std::size_t m) {
        if (!seen[m] && p.labels[m] == l) {
          seen[m] = 1;
          stack.push_back(m);
        }
      });
    }
    if (count != p.regions[l - 1].cells) return false;
  }
  return true;
}

void write_region_table(std::ostream& out, const RegionPartition& p) {
  const bool scored = std::any_of(p.regions.begin(), p.regions.end(),
                                  [](const RegionRecord& r) { return r.alpha.has_value(); });
  out << "label,seed_x,seed_y,cells,mean" << (scored ? ",alpha" : "") << '\n';
  for (const auto& r : p.regions) {
    const Point2 s = p.spec.cell_center(r.seed_i, r.seed_j);
    out << r.label << ',' << format_real(s.x()) << ',' << format_real(s.y()) << ',' << r.cells << ','
        << format_real(r.mean);
    if (scored) out << ',' << (r.alpha ? format_real(*r.alpha) : std::string("nan"));
    out << '\n';
  }
}

}  // namespace ftc
