#include "ftc/coherence.hpp"

#include "ftc/errors.hpp"
#include "ftc/fields.hpp"

#include <algorithm>
#include <cmath>

namespace ftc {

Point2 RegionSet::centroid() const {
  Point2 c = Point2::Zero();
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

void RegionSet::validate() const {
  if (points.empty()) throw ConfigError("region set is empty");
  if (!(area > 0.0)) throw ConfigError("region set area must be > 0");
}

RegionSet region_from_mask(const GridSpec& spec, const std::vector<std::uint8_t>& mask,
                           int supersample) {
  if (supersample < 1) throw ConfigError("supersample must be >= 1");
  if (mask.size() != spec.size()) throw ConfigError("mask size does not match grid");
  RegionSet r;
  r.dx = spec.dx();
  r.dy = spec.dy();
  std::size_t cells = 0;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      if (!mask[static_cast<std::size_t>(j) * spec.nx + i]) continue;
      ++cells;
      const double x0 = spec.bounds.x_min + i * r.dx, y0 = spec.bounds.y_min + j * r.dy;
      for (int b = 0; b < supersample; ++b)
        for (int a = 0; a < supersample; ++a)
          r.points.emplace_back(x0 + (a + 0.5) * r.dx / supersample,
                                y0 + (b + 0.5) * r.dy / supersample);
    }
  }
  r.area = static_cast<double>(cells) * r.dx * r.dy;
  r.validate();
  return r;
}

RegionSet region_from_label(const RegionPartition& partition, int label, int supersample) {
  if (label < 1 || label > static_cast<int>(partition.regions.size()))
    throw ConfigError("no region with label " + std::to_string(label));
  std::vector<std::uint8_t> mask(partition.labels.size());
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = partition.labels[k] == label;
  return region_from_mask(partition.spec, mask, supersample);
}

RegionSet region_from_mask_field(const FieldGrid& field, int supersample) {
  std::vector<std::uint8_t> mask(field.size());
  for (std::size_t k = 0; k < mask.size(); ++k)
    mask[k] = field.valid(k) && field.values()[k] != 0.0;
  return region_from_mask(field.spec(), mask, supersample);
}

RegionSet advect_region(const FlowSystem& flow, const RegionSet& a, const Epoch& epoch,
                        const AdvectionSettings& settings) {
  a.validate();
  const std::size_t n = a.points.size();
  std::vector<Point2> images(n);
  std::vector<std::uint8_t> escaped(n, 0);
  constexpr int kChunk = 256;
  const int chunks = static_cast<int>((n + kChunk - 1) / kChunk);
  for_each_row(chunks, settings.threads, [&](int c) {
    const std::size_t end = std::min(n, static_cast<std::size_t>(c + 1) * kChunk);
    for (std::size_t k = static_cast<std::size_t>(c) * kChunk; k < end; ++k) {
      try {
        images[k] = flow_map(flow, a.points[k], epoch, settings.integrator);
      } catch (const EscapeError&) {
        escaped[k] = 1;
      }
    }
  });
  const auto lost = static_cast<std::size_t>(std::count(escaped.begin(), escaped.end(), 1));
  if (static_cast<double>(lost) > settings.max_escape_fraction * static_cast<double>(n))
    throw EscapeError(std::to_string(lost) + " of " + std::to_string(n) +
                      " region points escaped during advection");
  RegionSet out;
  out.area = a.area;
  out.dx = a.dx;
  out.dy = a.dy;
  out.points.reserve(n - lost);
  for (std::size_t k = 0; k < n; ++k)
    if (!escaped[k]) out.points.push_back(images[k]);
  out.validate();
  return out;
}

Occupancy occupancy_for(const GridSpec& spec, double factor) {
  if (!(factor > 0.0)) throw ConfigError("occupancy factor must be > 0");
  return {spec.dx() / factor, spec.dy() / factor};
}

namespace {

std::int64_t cell_key(const Point2& p, const Occupancy& occ) {
  const auto a = static_cast<std::int64_t>(std::floor(p.x() / occ.hx));
  const auto b = static_cast<std::int64_t>(std::floor(p.y() / occ.hy));
  return a * (std::int64_t{1} << 32) + b;
}

void check_occupancy(const Occupancy& occ) {
  if (!(occ.hx > 0.0 && occ.hy > 0.0)) throw ConfigError("occupancy cell size must be > 0");
}

Occupancy resolve_occupancy(const Occupancy& occ, const RegionSet& b) {
  if (occ.hx > 0.0 && occ.hy > 0.0) return occ;
  if (!(b.dx > 0.0 && b.dy > 0.0))
    throw ConfigError("occupancy resolution needed for a set without a source grid");
  return {b.dx / 2.0, b.dy / 2.0};
}

}  // namespace

OccupancyTarget::OccupancyTarget(const RegionSet& p, const Occupancy& occ) : occ_(occ) {
  check_occupancy(occ);
  cells_.reserve(p.points.size());
  for (const auto& q : p.points) cells_.push_back(cell_key(q, occ));
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  if (cells_.empty()) throw NumericalError("empty occupancy");
}

double OccupancyTarget::overlap(const RegionSet& b, const RigidMotion& motion) const {
  const Point2 pivot = b.centroid();
  const Eigen::Matrix2d rot = rotation(motion.angle);
  std::vector<std::int64_t> moved;
  moved.reserve(b.points.size());
  for (const auto& q : b.points)
    moved.push_back(cell_key(pivot + rot * (q - pivot) + motion.translation, occ_));
  std::sort(moved.begin(), moved.end());
  moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
  if (moved.empty()) throw NumericalError("empty occupancy");
  std::size_t shared = 0;
  auto it = cells_.begin();
  for (const auto key : moved) {
    it = std::lower_bound(it, cells_.end(), key);
    if (it == cells_.end()) break;
    if (*it == key) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(moved.size());
}

double overlap_fraction(const RegionSet& p, const RegionSet& b, const RigidMotion& motion,
                        const Occupancy& occ) {
  p.validate();
  b.validate();
  return OccupancyTarget(p, occ).overlap(b, motion);
}

AlphaResult maximize_overlap(const RegionSet& p, const RegionSet& b, const AlphaSettings& settings) {
  p.validate();
  b.validate();
  if (settings.n_angles < 1) throw ConfigError("n_angles must be >= 1");
  if (settings.max_refine_evals < 0) throw ConfigError("max_refine_evals must be >= 0");
  const Occupancy occ = resolve_occupancy(settings.occupancy, b);
  const OccupancyTarget target(p, occ);
  const Vec2 t0 = p.centroid() - b.centroid();

  const int n = settings.n_angles;
  std::vector<double> scan(static_cast<std::size_t>(n));
  for_each_row(n, settings.advection.threads, [&](int k) {
    scan[k] = target.overlap(b, {2.0 * kPi * k / n, t0});
  });
  AlphaResult best{scan[0], {0.0, t0}, n};
  for (int k = 1; k < n; ++k)
    if (scan[k] > best.alpha) best = {scan[k], {2.0 * kPi * k / n, t0}, n};

  double step[3] = {kPi / n, 2.0 * occ.hx, 2.0 * occ.hy};
  const double min_step[3] = {1e-4 * kPi / n, occ.hx / 16.0, occ.hy / 16.0};
  int evals = 0;
  while (evals < settings.max_refine_evals) {
    bool improved = false;
    for (int c = 0; c < 3 && evals < settings.max_refine_evals; ++c) {
      for (double sign : {1.0, -1.0}) {
        if (evals >= settings.max_refine_evals) break;
        RigidMotion trial = best.motion;
        if (c == 0)
          trial.angle += sign * step[0];
        else
          trial.translation[c - 1] += sign * step[c];
        const double v = target.overlap(b, trial);
        ++evals;
        if (v > best.alpha) {
          best.alpha = v;
          best.motion = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      bool any = false;
      for (int c = 0; c < 3; ++c) {
        step[c] *= 0.5;
        any = any || step[c] >= min_step[c];
      }
      if (!any) break;
    }
  }
  best.evaluations = n + evals;
  best.motion.angle = std::remainder(best.motion.angle, 2.0 * kPi);
  return best;
}

AlphaResult shape_coherence_alpha(const FlowSystem& flow, const RegionSet& a, const RegionSet& b,
                                  const Epoch& epoch, const AlphaSettings& settings) {
  const RegionSet image = advect_region(flow, a, epoch, settings.advection);
  return maximize_overlap(image, b, settings);
}

}  // namespace ftc
