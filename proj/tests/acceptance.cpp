// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when a gating
// criterion fails; the Rossby band check (8) is reported but does not gate.

#include "oracles.hpp"

#include "ftc/coherence.hpp"
#include "ftc/curvature.hpp"
#include "ftc/curves.hpp"
#include "ftc/fields.hpp"
#include "ftc/grid_io.hpp"
#include "ftc/segmentation.hpp"
#include "ftc/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace ftc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Report {
  int failures = 0;
  void line(int id, const char* name, bool pass, const std::string& detail, bool gating = true) {
    std::printf("%s %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass && gating) ++failures;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string grid_bytes(const FieldGrid& g) {
  std::ostringstream out;
  write_grid(out, g, Payload::binary);
  return out.str();
}

FieldSettings open_settings(int threads) {
  FieldSettings s;
  s.kernel.integrator.guard_factor = 0.0;
  s.threads = threads;
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Criterion 10 collects grids from 1, 3 and 7 here.
struct DeterminismLog {
  std::vector<std::pair<std::string, std::function<FieldGrid(int)>>> runs;
  std::vector<std::string> serial;
};

// ---------------------------------------------------------------------------------------

void analytic_ftle(Report& rep, DeterminismLog& det) {
  const auto flow = FlowSystem::linear_saddle(1.0);
  const GridSpec g{32, 32, flow.bounds()};
  const Epoch e{0.0, 5.0};
  auto run = [=](int threads) { return compute_field(flow, e, FieldKernel::ftle, g, open_settings(threads)); };
  const auto t0 = Clock::now();
  const FieldGrid f = run(1);
  const double secs = seconds_since(t0);
  const FieldStats st = field_stats(f);
  const bool ok = f.invalid_count() == 0 && st.min >= 1.0 - 1e-3 && st.max <= 1.0 + 1e-3 && secs < 5.0;
  rep.line(1, "analytic-ftle", ok,
           fmt("min=%.9f max=%.9f invalid=%zu time=%.2fs", st.min, st.max, f.invalid_count(), secs));
  det.runs.emplace_back("saddle ftle", run);
  det.serial.push_back(grid_bytes(f));
}

void foliation_truth(Report& rep) {
  const auto flow = FlowSystem::linear_saddle(1.0);
  const GridSpec g{32, 32, flow.bounds()};
  const Epoch e{0.0, 5.0};
  KernelSettings ks;
  ks.integrator.guard_factor = 0.0;
  double worst_theta = 0.0, worst_s = 0.0, worst_u = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const FoliationSample f = foliation_pair(flow, g.cell_center(i, j), e, ks);
      worst_theta = std::max(worst_theta, std::abs(f.theta - oracle::pi / 2));
      worst_s = std::max(worst_s, oracle::line_angle(f.f_s, Vec2(0, 1)));
      worst_u = std::max(worst_u, oracle::line_angle(f.f_u, Vec2(1, 0)));
    }
  rep.line(2, "foliation-truth", worst_theta <= 1e-3 && worst_s <= 1e-3 && worst_u <= 1e-3,
           fmt("max|theta-pi/2|=%.3g f_s=%.3g f_u=%.3g rad", worst_theta, worst_s, worst_u));
}

void straightness_nullity(Report& rep, DeterminismLog& det) {
  const Epoch e{0.0, 5.0};
  double worst_C = 0.0, worst_r = 0.0;
  std::size_t invalid = 0;
  for (const auto& [name, flow] : {std::pair{"rotation", FlowSystem::rigid_rotation()},
                                   std::pair{"saddle", FlowSystem::linear_saddle(1.0)}}) {
    const GridSpec g{64, 64, flow.bounds()};
    for (FieldKernel k : {FieldKernel::maxftc, FieldKernel::ftc_ratio}) {
      auto run = [=](int threads) { return compute_field(flow, e, k, g, open_settings(threads)); };
      const FieldGrid f = run(1);
      invalid += f.invalid_count();
      for (double v : f.values())
        if (k == FieldKernel::maxftc)
          worst_C = std::max(worst_C, std::abs(v));
        else
          worst_r = std::max(worst_r, std::abs(v - 1.0));
      det.runs.emplace_back(std::string(name) + " " + std::string(to_string(k)), run);
      det.serial.push_back(grid_bytes(f));
    }
  }
  rep.line(3, "straightness-nullity", invalid == 0 && worst_C <= 1e-8 && worst_r <= 1e-6,
           fmt("max maxFTC=%.3g max|r-1|=%.3g invalid=%zu", worst_C, worst_r, invalid));
}

void circle_curvature(Report& rep) {
  const auto flow = FlowSystem::rigid_rotation();
  IntegratorSettings open;
  open.guard_factor = 0.0;
  double worst = 0.0;
  for (double R : {0.1, 1.0, 10.0}) {
    const double eps = 1e-3 * R;
    const Point2 c(0.2, -0.1);
    const double phi = 0.7;
    std::vector<Point2> pts;
    for (int k = -1; k <= 1; ++k) {
      const double a = phi + k * eps / R;
      pts.push_back(c + R * Vec2(std::cos(a), std::sin(a)));
    }
    const double kappa = probe_curvature(flow, pts, 1, {0.0, 2.0}, open);
    worst = std::max(worst, std::abs(kappa * R - 1.0));
  }
  rep.line(4, "circle-curvature", worst <= 1e-4, fmt("max |kappa R - 1|=%.3g over R in {0.1,1,10}", worst));
}

void svd_oracle(Report& rep) {
  auto gen = oracle::rng();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  double rec = 0.0, eig = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Jacobian2 m;
    m << u(gen), u(gen), u(gen), u(gen);
    m *= std::pow(10.0, expo(gen));
    const auto s = svd2<double>(m);
    rec = std::max(rec, (s.reconstruct() - m).norm() / m.norm());
    const auto [l1, l2] = oracle::gram_eigenvalues(m);
    const long double s1 = s.sigma1, s2 = s.sigma2;
    eig = std::max(eig, static_cast<double>(std::abs(s1 * s1 - l1) / l1));
    if (l2 > 0) eig = std::max(eig, static_cast<double>(std::abs(s2 * s2 - l2) / l2));
  }
  rep.line(5, "svd-oracle", rec <= 1e-12 && eig <= 1e-12,
           fmt("max reconstruction=%.3g max sigma^2 rel=%.3g (1000 matrices)", rec, eig));
}

void convergence(Report& rep) {
  const auto dg = FlowSystem::double_gyre();
  const GridSpec g{16, 8, dg.bounds()};
  const Epoch e{0.0, 10.0};
  FieldSettings base;
  const double eps = 1e-4 * dg.bounds().width();
  base.probe.epsilon = eps;
  FieldSettings half = base, dirs = base;
  half.probe.epsilon = eps / 2;
  dirs.probe.n_dirs = 64;
  const FieldGrid f0 = compute_field(dg, e, FieldKernel::maxftc, g, base);
  const FieldGrid fe = compute_field(dg, e, FieldKernel::maxftc, g, half);
  const FieldGrid fd = compute_field(dg, e, FieldKernel::maxftc, g, dirs);
  std::vector<double> de, dd;
  for (std::size_t k = 0; k < f0.size(); ++k) {
    if (!f0.valid(k) || !fe.valid(k) || !fd.valid(k)) continue;
    const double v = f0.values()[k];
    de.push_back(std::abs(fe.values()[k] - v) / v);
    dd.push_back(std::abs(fd.values()[k] - v) / v);
  }
  const double me = median(de), md = median(dd);
  rep.line(6, "eps-direction-convergence", de.size() == f0.size() && me <= 0.05 && md <= 0.05,
           fmt("median rel change eps/2=%.3g dirs 64=%.3g (%zu points)", me, md, de.size()));
}

void double_gyre_structure(Report& rep, DeterminismLog& det) {
  const auto dg = FlowSystem::double_gyre();
  const GridSpec g{256, 128, dg.bounds()};
  const Epoch e{0.0, 15.0};
  auto ftc_run = [=](int threads) {
    FieldSettings s;
    s.threads = threads;
    return compute_field(dg, e, FieldKernel::ftc_ratio, g, s);
  };
  auto ftle_run = [=](int threads) {
    FieldSettings s;
    s.threads = threads;
    return compute_field(dg, e, FieldKernel::ftle, g, s);
  };
  const auto t0 = Clock::now();
  const FieldGrid ratio = ftc_run(1);
  const FieldGrid ftle = ftle_run(1);
  const double field_secs = seconds_since(t0);
  det.runs.emplace_back("double gyre ftc_ratio", ftc_run);
  det.runs.emplace_back("double gyre ftle", ftle_run);
  det.serial.push_back(grid_bytes(ratio));
  det.serial.push_back(grid_bytes(ftle));

  const auto troughs = ftc_troughs(ratio, 0.1);
  const auto ridges = ftle_ridges(ftle, 0.1);

  // Enclosed regions below 100 cells are not resolved by the overlap raster: the boundary
  // layer alone moves alpha by more than 0.1.
  constexpr std::size_t kMinCells = 100;
  std::size_t closed = 0, resolvable = 0;
  double best = -1.0, best_any = -1.0;
  std::size_t best_cells = 0, best_any_cells = 0;
  for (const auto& c : troughs) {
    if (!c.closed) continue;
    ++closed;
    std::vector<std::uint8_t> mask(g.size());
    std::size_t cells = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (encloses(c, g.cell_center(i, j))) {
          mask[static_cast<std::size_t>(j) * g.nx + i] = 1;
          ++cells;
        }
    if (cells == 0) continue;
    const RegionSet a = region_from_mask(g, mask);
    const double alpha = shape_coherence_alpha(dg, a, a, e, AlphaSettings{}).alpha;
    if (alpha > best_any) {
      best_any = alpha;
      best_any_cells = cells;
    }
    if (cells >= kMinCells) {
      ++resolvable;
      if (alpha > best) {
        best = alpha;
        best_cells = cells;
      }
    }
  }

  const double three_cells = 3.0 * std::max(g.dx(), g.dy());
  bool far_from_some = false, far_from_all = false;
  for (const auto& r : ridges) {
    double nearest = 1e300, farthest = 0.0;
    for (const auto& t : troughs) {
      const double d = polyline_distance(r, t);
      nearest = std::min(nearest, d);
      farthest = std::max(farthest, d);
    }
    far_from_some = far_from_some || (!troughs.empty() && farthest > three_cells);
    far_from_all = far_from_all || (!troughs.empty() && nearest > three_cells);
  }

  const bool ok = closed >= 1 && best >= 0.8 && far_from_all;
  rep.line(7, "double-gyre-structure", ok,
           fmt("troughs=%zu closed=%zu resolvable(>=%zu cells)=%zu best alpha=%.3f (%zu cells) "
               "best any size=%.3f (%zu cells) ridges=%zu ridge clear of all troughs=%s "
               "of some trough=%s fields=%.0fs",
               troughs.size(), closed, kMinCells, resolvable, best, best_cells, best_any,
               best_any_cells, ridges.size(), far_from_all ? "yes" : "no", far_from_some ? "yes" : "no",
               field_secs));
}

void rossby_band(Report& rep) {
  const RossbyParams p = RossbyParams::defaults();
  const auto flow = FlowSystem::rossby_wave(p);
  const GridSpec g{256, 128, flow.bounds()};
  const Epoch e{0.0, 10.0};
  FieldSettings s;
  s.probe.n_dirs = 16;
  s.threads = 8;
  const auto t0 = Clock::now();
  const FieldGrid ratio = compute_field(flow, e, FieldKernel::ftc_ratio, g, s);
  const RegionPartition part = seeded_region_growing(ratio);

  // Middle band: spans at least 80% of the width, centroid nearest the jet axis. Without
  // one, the widest region crossing the middle row is scored as a diagnostic.
  const int mid = g.ny / 2;
  const double axis = 0.5 * (g.bounds.y_min + g.bounds.y_max);
  int band = 0, widest = 0, widest_span = 0;
  double band_offset = 1e300;
  for (const auto& r : part.regions) {
    const int span = r.i_max - r.i_min + 1;
    bool crosses = false;
    double ysum = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (part.label(i, j) == r.label) {
          ysum += g.cell_center(i, j).y();
          crosses = crosses || j == mid;
        }
    if (crosses && span > widest_span) {
      widest_span = span;
      widest = r.label;
    }
    if (10 * span < 8 * g.nx) continue;
    const double off = std::abs(ysum / static_cast<double>(r.cells) - axis);
    if (off < band_offset) {
      band_offset = off;
      band = r.label;
    }
  }
  const std::string constants =
      fmt("U0=%.4g L=%.6g A=(%.3g,%.3g,%.3g) c=(%.6g,%.6g,%.6g) k=(%.6g,%.6g) sigma=(%.6g,%.6g) (U0, c in m/s; L in km; k in 1/km; sigma in 1/day)",
          p.U0, p.L, p.A1, p.A2, p.A3, p.c1, p.c2, p.c3, p.k1, p.k2, p.sigma1, p.sigma2);
  const int scored = band ? band : widest;
  const double alpha =
      scored ? shape_coherence_alpha(flow, region_from_label(part, scored), region_from_label(part, scored), e,
                                     AlphaSettings{})
                   .alpha
             : -1.0;
  const double secs = seconds_since(t0);
  if (band == 0) {
    rep.line(8, "rossby-band-alpha", false,
             fmt("no region spans 80%% of the width (%zu regions); widest mid-row region spans %.0f%% "
                 "with alpha=%.4f; time=%.0fs; %s [not gating]",
                 part.regions.size(), 100.0 * widest_span / g.nx, alpha, secs, constants.c_str()),
             false);
    return;
  }
  rep.line(8, "rossby-band-alpha", std::abs(alpha - 0.8574) <= 0.1,
           fmt("alpha=%.4f target 0.8574+-0.1 band cells=%zu regions=%zu time=%.0fs; %s [not gating]", alpha,
               part.region(band).cells, part.regions.size(), secs, constants.c_str()),
           false);
}

void rotated_square(Report& rep) {
  const GridSpec g{256, 256, {0, 1, 0, 1}};
  const RegionSet sq = region_from_mask(g, std::vector<std::uint8_t>(g.size(), 1), 2);
  const double f = overlap_fraction(sq, sq, {oracle::pi / 4, Vec2::Zero()}, {1.0 / 256, 1.0 / 256});
  const double want = 2 * (std::sqrt(2.0) - 1);
  rep.line(9, "rotated-square-overlap", std::abs(f - want) <= 0.02, fmt("overlap=%.5f exact=%.5f", f, want));
}

void determinism(Report& rep, const DeterminismLog& det) {
  std::string diffs;
  for (std::size_t k = 0; k < det.runs.size(); ++k)
    if (grid_bytes(det.runs[k].second(8)) != det.serial[k]) diffs += " " + det.runs[k].first;
  rep.line(10, "determinism-1-vs-8", diffs.empty(),
           fmt("%zu grids compared%s%s", det.runs.size(), diffs.empty() ? "" : "; differ:", diffs.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  // Optional criterion ids restrict the run, e.g. `acceptance 4 8`.
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));
  Report rep;
  DeterminismLog det;
  const std::vector<std::pair<int, std::function<void()>>> steps = {
      {1, [&] { analytic_ftle(rep, det); }},
      {2, [&] { foliation_truth(rep); }},
      {3, [&] { straightness_nullity(rep, det); }},
      {4, [&] { circle_curvature(rep); }},
      {5, [&] { svd_oracle(rep); }},
      {6, [&] { convergence(rep); }},
      {7, [&] { double_gyre_structure(rep, det); }},
      {8, [&] { rossby_band(rep); }},
      {9, [&] { rotated_square(rep); }},
      {10, [&] { determinism(rep, det); }},
  };
  for (const auto& [id, step] : steps) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    try {
      step();
    } catch (const std::exception& ex) {
      rep.line(id, "error", false, ex.what(), id != 8);
    }
  }
  std::printf("%d gating failure(s)\n", rep.failures);
  return rep.failures == 0 ? 0 : 1;
}
