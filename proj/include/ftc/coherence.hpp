#pragma once

#include "ftc/flows.hpp"
#include "ftc/integrate.hpp"
#include "ftc/segmentation.hpp"
#include "ftc/types.hpp"

#include <vector>

namespace ftc {

/// A measurable set represented by sample points, each standing for an equal share of
/// `area`.
struct RegionSet {
  std::vector<Point2> points;
  double area = 0.0;
  /// Cell size of the grid the set was sampled from.
  double dx = 0.0;
  double dy = 0.0;

  Point2 centroid() const;
  void validate() const;
};

/// Samples each selected cell with a `supersample` x `supersample` lattice of sub-cell
/// centers (1 gives the cell centers). Area is cell count times cell area.
RegionSet region_from_mask(const GridSpec& spec, const std::vector<std::uint8_t>& mask,
                           int supersample = 4);
RegionSet region_from_label(const RegionPartition& partition, int label, int supersample = 4);
/// Cells of a mask grid with a nonzero valid value.
RegionSet region_from_mask_field(const FieldGrid& mask, int supersample = 4);

struct AdvectionSettings {
  IntegratorSettings integrator;
  /// Largest tolerated fraction of escaping points; escaped points are dropped.
  double max_escape_fraction = 0.01;
  int threads = 1;
};

/// Images of all sample points; area carried over unchanged.
RegionSet advect_region(const FlowSystem& flow, const RegionSet& a, const Epoch& epoch,
                        const AdvectionSettings& settings = {});

struct RigidMotion {
  double angle = 0.0;
  Vec2 translation = Vec2::Zero();
};

/// Applies `m` to `p` as a rotation about `pivot` followed by the translation.
inline Point2 apply(const RigidMotion& m, const Point2& pivot, const Point2& p) {
  return pivot + rotation(m.angle) * (p - pivot) + m.translation;
}

/// Occupancy lattice: cell (a, b) covers [a*hx, (a+1)*hx) x [b*hy, (b+1)*hy).
struct Occupancy {
  double hx = 0.0;
  double hy = 0.0;
};

/// Occupancy lattice at `factor` times the resolution of `spec` per axis.
Occupancy occupancy_for(const GridSpec& spec, double factor = 2.0);

/// Precomputed occupied cells of the advected set.
class OccupancyTarget {
 public:
  OccupancyTarget(const RegionSet& p, const Occupancy& occ);

  /// |cells(target) ∩ cells(moved B)| / |cells(moved B)|, B moved about its centroid.
  double overlap(const RegionSet& b, const RigidMotion& motion) const;
  std::size_t cell_count() const { return cells_.size(); }

 private:
  Occupancy occ_;
  std::vector<std::int64_t> cells_;  // sorted
};

double overlap_fraction(const RegionSet& p, const RegionSet& b, const RigidMotion& motion,
                        const Occupancy& occ);

struct AlphaSettings {
  int n_angles = 360;
  int max_refine_evals = 200;
  /// Zero cell sizes select half the source cell size of `b`.
  Occupancy occupancy;
  AdvectionSettings advection;
};

struct AlphaResult {
  double alpha = 0.0;
  RigidMotion motion;
  int evaluations = 0;
};

/// Best overlap of rigid motions of `b` with the already advected set `p`: centroid
/// alignment and an angle scan, then coordinate descent over (angle, tx, ty) with
/// shrinking steps. Only strict improvements are accepted.
AlphaResult maximize_overlap(const RegionSet& p, const RegionSet& b, const AlphaSettings& settings);

/// Shape coherence of `a` against `b` over the epoch: maximize_overlap of the image of `a`.
AlphaResult shape_coherence_alpha(const FlowSystem& flow, const RegionSet& a, const RegionSet& b,
                                  const Epoch& epoch, const AlphaSettings& settings);

}  // namespace ftc
