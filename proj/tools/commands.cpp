#include "commands.hpp"

#include "config.hpp"
#include "plot.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

namespace ftc::app {

namespace {

namespace fs = std::filesystem;

/// Config path plus command-line overrides, applied in the order given.
struct Settings {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void push(const std::string& key, const std::string& value) { overrides.emplace_back(key, value); }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load(config_path);
    std::set<std::string> cleared;
    for (const auto& [k, v] : overrides) {
      if (k == "set") {
        cfg.set_assignment(v);
      } else if (RunConfig::list_key(k)) {
        auto list = cleared.insert(k).second ? std::vector<std::string>{} : cfg.list(k);
        list.push_back(v);
        cfg.set_list(k, list);
      } else {
        cfg.set(k, v);
      }
    }
    return cfg;
  }

  bool overridden(const std::string& key) const {
    for (const auto& [k, v] : overrides) {
      if (k == key) return true;
      if (k == "set" && v.rfind(key + "=", 0) == 0) return true;
    }
    return false;
  }
};

void option(CLI::App* app, Settings& s, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_option_function<std::string>(flag, [&s, key](const std::string& v) { s.push(key, v); }, help);
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("-c,--config", s.config_path, "Config file (flat [section] key = value)");
  app->add_option_function<std::vector<std::string>>(
         "--set", [&s](const std::vector<std::string>& v) { for (const auto& a : v) s.push("set", a); },
         "Override any config key: section.key=value")
      ->allow_extra_args(false);
  option(app, s, "--flow", "flow.kind", "double-gyre | rossby-wave | rigid-rotation | linear-saddle | custom-hamiltonian");
  app->add_option_function<std::vector<std::string>>(
         "--param",
         [&s](const std::vector<std::string>& v) {
           for (const auto& a : v) {
             const auto eq = a.find('=');
             if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected name=value");
             s.push("params." + a.substr(0, eq), a.substr(eq + 1));
           }
         },
         "Flow parameter name=value")
      ->allow_extra_args(false);
  app->add_option_function<std::vector<std::string>>(
         "--term", [&s](const std::vector<std::string>& v) { for (const auto& a : v) s.push("flow.term", a); },
         "Hamiltonian term 'amp xfactor... yfactor...'")
      ->allow_extra_args(false);
  option(app, s, "--bounds", "flow.bounds", "x_min x_max y_min y_max");
  option(app, s, "--t0", "epoch.t0", "Initial time");
  option(app, s, "--tau", "epoch.tau", "Epoch length (negative for backward)");
  app->add_option_function<std::string>(
      "--grid",
      [&s](const std::string& v) {
        const auto [nx, ny] = parse_grid_size(v);
        s.push("grid.nx", std::to_string(nx));
        s.push("grid.ny", std::to_string(ny));
      },
      "Grid size NXxNY");
  option(app, s, "--integrator", "integrator.method", "rk4 | rk45");
  option(app, s, "--step", "integrator.step", "Fixed RK4 step");
  option(app, s, "--steps", "integrator.default_steps", "RK4 steps per epoch when no step is given");
  option(app, s, "--jacobian", "jacobian.method", "finite_difference | variational");
  option(app, s, "--epsilon", "probe.epsilon", "Probe segment half length");
  option(app, s, "--n-dirs", "probe.n_dirs", "Probe directions over [0, pi)");
  option(app, s, "--n-probe", "probe.n_probe", "Points per probe segment (odd)");
  option(app, s, "--estimator", "probe.estimator", "auto | menger | parametric");
  app->add_flag_callback("--refine", [&s] { s.push("probe.refine", "1"); }, "Refine extremal directions");
  app->add_flag_callback("--max-along", [&s] { s.push("probe.max_along", "1"); },
                         "Use the largest curvature along the advected segment");
  option(app, s, "--threads", "run.threads", "Worker count (default $FTC_THREADS or all cores)");
}

void write_meta(const fs::path& path, const std::map<std::string, std::string>& meta) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  return out;
}

ColorScale scale_for(const std::string& scale, FieldKernel kernel) {
  if (scale == "linear") return ColorScale::linear;
  if (scale == "log") return ColorScale::log10;
  if (scale != "auto") throw ConfigError("output.scale must be auto, linear or log");
  return kernel == FieldKernel::ftc_ratio ? ColorScale::log10 : ColorScale::linear;
}

FieldKernel kernel_of(const FieldGrid& field, FieldKernel fallback) {
  const auto it = field.meta.find("kernel");
  return it == field.meta.end() ? fallback : parse_kernel(it->second);
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
  return base.parent_path() / (base.filename().string() + suffix);
}

// ---------------------------------------------------------------- field

struct FieldArgs {
  std::string out;
  std::string plot;
};

int cmd_field(const Settings& s, const FieldArgs& a, std::ostream& out) {
  const RunConfig cfg = s.resolve();
  const FlowSystem flow = flow_from_config(cfg);
  const Epoch epoch = epoch_from_config(cfg);
  const GridSpec grid = grid_from_config(cfg, flow);
  const FieldSettings fs_ = field_settings_from_config(cfg);
  const FieldKernel kernel = parse_kernel(cfg.text("field.kernel", "ftc_ratio"));
  const Payload payload = parse_payload(cfg.text("output.payload", "csv"));
  const ColorScale scale = scale_for(cfg.text("output.scale", "auto"), kernel);
  const int samples = static_cast<int>(cfg.integer("output.slice_samples", 256));
  std::vector<std::pair<Point2, Point2>> lines;
  for (const auto& l : cfg.list("output.slice")) lines.push_back(parse_slice_line(l));
  if (samples < 2 && !lines.empty()) throw ConfigError("output.slice_samples must be >= 2");

  const FieldGrid field = compute_field(flow, epoch, kernel, grid, fs_);
  write_grid(a.out, field, payload);
  const auto st = field_stats(field);
  out << "wrote " << a.out << " (" << to_string(kernel) << ", " << grid.nx << "x" << grid.ny
      << ", min " << format_real(st.min) << ", max " << format_real(st.max) << ", invalid "
      << st.invalid << ")\n";

  std::optional<Raster> raster;
  if (!a.plot.empty()) raster = heatmap(field, scale);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const SliceTrace trace = slice(field, lines[k].first, lines[k].second, samples);
    const fs::path csv = sibling(a.out, ".slice" + std::to_string(k) + ".csv");
    auto o = open_out(csv);
    o << "s,x,y,value\n";
    for (std::size_t m = 0; m < trace.values.size(); ++m)
      o << format_real(static_cast<double>(m) / (trace.values.size() - 1)) << ','
        << format_real(trace.positions[m].x()) << ',' << format_real(trace.positions[m].y()) << ','
        << format_real(trace.values[m]) << '\n';
    auto meta = field.meta;
    meta["slice.start"] = format_real(trace.start.x()) + "," + format_real(trace.start.y());
    meta["slice.end"] = format_real(trace.end.x()) + "," + format_real(trace.end.y());
    meta["slice.samples"] = std::to_string(samples);
    write_meta(sibling(csv, ".meta"), meta);
    out << "wrote " << csv.string() << '\n';
    if (raster) {
      draw_segment(*raster, trace.start, trace.end, {230, 20, 20});
      const fs::path chart = sibling(fs::path(a.plot), ".slice" + std::to_string(k) + ".ppm");
      slice_chart(trace, scale == ColorScale::log10).write(chart);
    }
  }
  if (raster) {
    raster->image.write(a.plot);
    out << "wrote " << a.plot << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- curves

struct CurvesArgs {
  std::string out_dir = ".";
  std::string ftc, ftle, theta;
  std::string field, seed;
  std::optional<double> level;
  std::string plot;
};

std::vector<std::string> families(const RunConfig& cfg) {
  std::vector<std::string> f;
  for (const auto& t : split(cfg.text("curves.families", "trough,ridge"), ',')) {
    const std::string name(trim(t));
    if (name != "trough" && name != "ridge" && name != "zero")
      throw ConfigError("curves.families entries must be trough, ridge or zero, got '" + name + "'");
    f.push_back(name);
  }
  return f;
}

void save_curves(const fs::path& path, const std::vector<Polyline>& curves,
                 std::map<std::string, std::string> meta, std::ostream& out) {
  auto o = open_out(path);
  write_polylines(o, curves);
  meta["curves.count"] = std::to_string(curves.size());
  write_meta(sibling(path, ".meta"), meta);
  std::size_t closed = 0;
  for (const auto& c : curves) closed += c.closed;
  out << "wrote " << path.string() << " (" << curves.size() << " curves, " << closed << " closed)\n";
}

int cmd_curves(const Settings& s, const CurvesArgs& a, std::ostream& out) {
  const RunConfig cfg = s.resolve();
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const double q = cfg.real("curves.quantile", 0.1);
  const double theta_tol = cfg.real("curves.theta_tol", 0.05);
  std::optional<Raster> raster;

  if (!a.field.empty()) {
    if (a.seed.empty()) throw ConfigError("--field needs --seed x,y");
    const FieldGrid field = read_grid(a.field);
    const BicubicField interp(field);
    const ScalarFunction f = interp.as_function();
    Point2 seed = parse_point(a.seed);
    const ContinuationSettings cs = continuation_for(field);
    const double level = a.level.value_or(f.value(seed));
    if (a.level && !project_to_level(f, seed, level, cs, std::hypot(field.dx(), field.dy())))
      throw NumericalError("seed could not be projected onto the requested level");
    Polyline curve = continue_level_curve(f, seed, level, cs);
    auto meta = field.meta;
    meta["curves.seed"] = a.seed;
    meta["curves.level"] = format_real(level);
    save_curves(dir / "level_set.csv", {curve}, meta, out);
    if (!a.plot.empty()) {
      raster = heatmap(field, ColorScale::linear);
      draw_polylines(*raster, {curve}, {255, 255, 255});
    }
  } else {
    const auto fam = families(cfg);
    auto wants = [&](const std::string& n) { return std::find(fam.begin(), fam.end(), n) != fam.end(); };
    std::optional<FlowSystem> flow;
    auto compute = [&](FieldKernel kernel) {
      if (!flow) flow = flow_from_config(cfg);
      return compute_field(*flow, epoch_from_config(cfg), kernel, grid_from_config(cfg, *flow),
                           field_settings_from_config(cfg));
    };
    std::optional<FieldGrid> ftc, ftle;
    std::vector<Polyline> troughs, ridges;
    if (wants("trough")) {
      ftc = a.ftc.empty() ? compute(FieldKernel::ftc_ratio) : read_grid(a.ftc);
      troughs = ftc_troughs(*ftc, q);
      auto meta = ftc->meta;
      meta["curves.quantile"] = format_real(q);
      save_curves(dir / "troughs.csv", troughs, meta, out);
    }
    if (wants("ridge")) {
      ftle = a.ftle.empty() ? compute(FieldKernel::ftle) : read_grid(a.ftle);
      ridges = ftle_ridges(*ftle, q);
      auto meta = ftle->meta;
      meta["curves.quantile"] = format_real(q);
      save_curves(dir / "ridges.csv", ridges, meta, out);
    }
    std::vector<Polyline> zeros;
    if (wants("zero")) {
      const FieldGrid theta = a.theta.empty() ? compute(FieldKernel::signed_theta) : read_grid(a.theta);
      if (kernel_of(theta, FieldKernel::signed_theta) != FieldKernel::signed_theta)
        throw ConfigError("zero-splitting curves need a signed_theta field");
      if (theta.invalid_count() < theta.size()) zeros = zero_splitting_from_field(theta, theta_tol);
      auto meta = theta.meta;
      meta["curves.theta_tol"] = format_real(theta_tol);
      save_curves(dir / "zero_splitting.csv", zeros, meta, out);
    }
    if (!a.plot.empty()) {
      if (ftc)
        raster = heatmap(*ftc, ColorScale::log10);
      else if (ftle)
        raster = heatmap(*ftle, ColorScale::linear);
      else {
        if (!flow) flow = flow_from_config(cfg);
        raster = Raster{Image(512, 512, {255, 255, 255}), flow->bounds()};
      }
      draw_polylines(*raster, ridges, {220, 30, 30});
      draw_polylines(*raster, troughs, {40, 90, 230});
      draw_polylines(*raster, zeros, {255, 255, 255});
    }
  }
  if (raster) {
    raster->image.write(a.plot);
    out << "wrote " << a.plot << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string field;
  std::string out;
  std::string table;
  std::string plot;
  bool score = false;
};

int cmd_segment(const Settings& s, const SegmentArgs& a, std::ostream& out) {
  const RunConfig cfg = s.resolve();
  const FieldGrid field = read_grid(a.field);
  const GrowingSettings gs = growing_from_config(cfg);
  const auto min_cells = cfg.integer("segment.min_cells", 1);
  if (min_cells < 1) throw ConfigError("segment.min_cells must be >= 1");

  RegionPartition p = seeded_region_growing(field, gs);
  if (min_cells > 1) p = merge_small_regions(p, static_cast<std::size_t>(min_cells));

  auto meta = field.meta;
  meta["segment.n_seeds"] = std::to_string(gs.n_seeds);
  meta["segment.threshold"] = format_real(gs.threshold);
  meta["segment.transform"] = gs.transform == ValueTransform::log10 ? "log10" : "none";
  meta["segment.min_cells"] = std::to_string(min_cells);
  meta["segment.source_hash"] = settings_hash(field.meta);

  if (a.score) {
    // Flow, epoch and integrator come from the field's provenance unless overridden.
    const FlowSystem flow = s.overridden("flow.kind") ? flow_from_config(cfg) : flow_from_meta(field.meta);
    const Epoch epoch = cfg.has("epoch.tau") ? epoch_from_config(cfg) : epoch_from_meta(field.meta);
    AlphaSettings as = alpha_from_config(cfg);
    if (!cfg.has("integrator.method") && !cfg.has("integrator.step") && !cfg.has("integrator.default_steps"))
      as.advection.integrator = settings_from_meta(field.meta).kernel.integrator;
    const int ss = static_cast<int>(cfg.integer("alpha.supersample", 4));
    as.occupancy = occupancy_for(p.spec, cfg.real("alpha.occupancy_factor", 2.0));
    for (auto& r : p.regions) {
      const RegionSet set = region_from_label(p, r.label, ss);
      r.alpha = shape_coherence_alpha(flow, set, set, epoch, as).alpha;
    }
    meta["alpha.epoch.t0"] = format_real(epoch.t0);
    meta["alpha.epoch.tau"] = format_real(epoch.tau);
    meta["alpha.n_angles"] = std::to_string(as.n_angles);
    meta["alpha.supersample"] = std::to_string(ss);
  }

  write_grid(a.out, p.to_field(meta), Payload::integer);
  out << "wrote " << a.out << " (" << p.regions.size() << " regions, " << p.assigned() << " of "
      << p.labels.size() << " cells assigned)\n";
  const fs::path table = a.table.empty() ? sibling(a.out, ".regions.csv") : fs::path(a.table);
  {
    auto o = open_out(table);
    write_region_table(o, p);
  }
  write_meta(sibling(table, ".meta"), meta);
  out << "wrote " << table.string() << '\n';
  if (!a.plot.empty()) {
    label_map(p).image.write(a.plot);
    out << "wrote " << a.plot << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- alpha

struct AlphaArgs {
  std::string mask;
  std::string labels;
  int label = 0;
  std::string target;
  bool json = false;
};

RegionSet load_region(const std::string& path, int label, int supersample) {
  const FieldGrid grid = read_grid(path);
  if (label == 0) return region_from_mask_field(grid, supersample);
  return region_from_label(RegionPartition::from_field(grid), label, supersample);
}

int cmd_alpha(const Settings& s, const AlphaArgs& a, std::ostream& out) {
  const RunConfig cfg = s.resolve();
  if (a.mask.empty() == a.labels.empty()) throw ConfigError("give exactly one of --mask or --labels");
  if (!a.labels.empty() && a.label < 1) throw ConfigError("--labels needs --label N (N >= 1)");
  const std::string source = a.mask.empty() ? a.labels : a.mask;
  const FieldGrid source_grid = read_grid(source);
  const bool from_meta = !s.overridden("flow.kind") && !cfg.has("flow.kind") && source_grid.meta.count("flow.kind");
  const FlowSystem flow = from_meta ? flow_from_meta(source_grid.meta) : flow_from_config(cfg);
  const Epoch epoch = from_meta && !cfg.has("epoch.tau") ? epoch_from_meta(source_grid.meta) : epoch_from_config(cfg);

  const int ss = static_cast<int>(cfg.integer("alpha.supersample", 4));
  const RegionSet A = load_region(source, a.labels.empty() ? 0 : a.label, ss);
  const RegionSet B = a.target.empty() ? A : load_region(a.target, 0, ss);
  AlphaSettings as = alpha_from_config(cfg);
  if (from_meta && !cfg.has("integrator.method") && !cfg.has("integrator.step") &&
      !cfg.has("integrator.default_steps"))
    as.advection.integrator = settings_from_meta(source_grid.meta).kernel.integrator;
  as.occupancy = occupancy_for(source_grid.spec(), cfg.real("alpha.occupancy_factor", 2.0));
  const AlphaResult r = shape_coherence_alpha(flow, A, B, epoch, as);

  if (a.json) {
    nlohmann::ordered_json j;
    j["alpha"] = r.alpha;
    j["angle"] = r.motion.angle;
    j["translation"] = {r.motion.translation.x(), r.motion.translation.y()};
    j["evaluations"] = r.evaluations;
    j["flow"] = std::string(to_string(flow.kind()));
    j["t0"] = epoch.t0;
    j["tau"] = epoch.tau;
    j["points"] = A.points.size();
    out << j.dump(2) << '\n';
  } else {
    out << "alpha " << format_real(r.alpha) << '\n'
        << "angle " << format_real(r.motion.angle) << '\n'
        << "translation " << format_real(r.motion.translation.x()) << ' '
        << format_real(r.motion.translation.y()) << '\n'
        << "evaluations " << r.evaluations << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  int repeat = 1;
};

int cmd_bench(const Settings& s, const BenchArgs& a, std::ostream& out) {
  const RunConfig cfg = s.resolve();
  const FlowSystem flow = flow_from_config(cfg);
  const Epoch epoch = epoch_from_config(cfg);
  const GridSpec grid = grid_from_config(cfg, flow);
  FieldSettings fs_ = field_settings_from_config(cfg);
  const FieldKernel kernel = parse_kernel(cfg.text("field.kernel", "ftc_ratio"));
  if (a.repeat < 1) throw ConfigError("--repeat must be >= 1");

  auto timed = [&](int threads, FieldGrid& result) {
    FieldSettings t = fs_;
    t.threads = threads;
    double best = 1e300;
    for (int r = 0; r < a.repeat; ++r) {
      const auto start = std::chrono::steady_clock::now();
      result = compute_field(flow, epoch, kernel, grid, t);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  FieldGrid serial, parallel;
  const double t1 = timed(1, serial);
  const double tn = timed(fs_.threads, parallel);
  const bool same = std::equal(serial.values().begin(), serial.values().end(), parallel.values().begin(),
                               [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); });
  nlohmann::ordered_json j;
  j["kernel"] = std::string(to_string(kernel));
  j["flow"] = std::string(to_string(flow.kind()));
  j["grid"] = std::to_string(grid.nx) + "x" + std::to_string(grid.ny);
  j["threads"] = fs_.threads;
  j["seconds_1"] = t1;
  j["seconds_n"] = tn;
  j["cells_per_second_n"] = static_cast<double>(grid.size()) / tn;
  j["identical"] = same;
  out << j.dump(2) << '\n';
  return same ? kOk : kNumericalError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-time curvature, FTLE and shape coherence of 2D flows", "ftc"};
  app.require_subcommand(1);

  Settings field_s, curves_s, segment_s, alpha_s, bench_s;

  FieldArgs fa;
  auto* field = app.add_subcommand("field", "Compute a scalar field over a grid");
  add_common(field, field_s);
  field->add_option("-o,--out", fa.out, "Output grid file")->required();
  option(field, field_s, "--kernel", "field.kernel", "ftle | maxftc | minftc | ftc_ratio | theta | signed_theta");
  option(field, field_s, "--payload", "output.payload", "csv | binary");
  field->add_option("--plot", fa.plot, "Heatmap image (PPM)");
  option(field, field_s, "--scale", "output.scale", "auto | linear | log");
  field->add_option_function<std::vector<std::string>>(
           "--slice", [&](const std::vector<std::string>& v) { for (const auto& l : v) field_s.push("output.slice", l); },
           "Slice line x0,y0:x1,y1")
      ->allow_extra_args(false);
  option(field, field_s, "--slice-samples", "output.slice_samples", "Samples per slice");

  CurvesArgs ca;
  auto* curves = app.add_subcommand("curves", "Extract FTC troughs, FTLE ridges and zero-splitting curves");
  add_common(curves, curves_s);
  curves->add_option("--out-dir", ca.out_dir, "Directory for polyline CSVs");
  option(curves, curves_s, "--families", "curves.families", "Comma list of trough, ridge, zero");
  curves->add_option("--ftc", ca.ftc, "Precomputed ftc_ratio grid");
  curves->add_option("--ftle", ca.ftle, "Precomputed ftle grid");
  curves->add_option("--theta", ca.theta, "Precomputed signed_theta grid");
  curves->add_option("--field", ca.field, "Trace one level curve of this grid");
  curves->add_option("--seed", ca.seed, "Seed point x,y for --field");
  curves->add_option("--level", ca.level, "Level for --field (default: value at seed)");
  option(curves, curves_s, "--quantile", "curves.quantile", "Extremal cell quantile");
  option(curves, curves_s, "--theta-tol", "curves.theta_tol", "Zero-splitting seed tolerance (rad)");
  curves->add_option("--plot", ca.plot, "Overlay image (PPM)");

  SegmentArgs sa;
  auto* segment = app.add_subcommand("segment", "Seeded region growing on an FTC field");
  add_common(segment, segment_s);
  segment->add_option("--field", sa.field, "Input grid")->required();
  segment->add_option("-o,--out", sa.out, "Label grid output")->required();
  segment->add_option("--table", sa.table, "Region table CSV (default <out>.regions.csv)");
  option(segment, segment_s, "--n-seeds", "segment.n_seeds", "Seed count");
  option(segment, segment_s, "--threshold", "segment.threshold", "Admission threshold");
  option(segment, segment_s, "--transform", "segment.transform", "log10 | none");
  option(segment, segment_s, "--min-cells", "segment.min_cells", "Merge regions below this size");
  segment->add_flag("--score", sa.score, "Score every region with alpha (B = A)");
  option(segment, segment_s, "--n-angles", "alpha.n_angles", "Angle scan samples");
  segment->add_option("--plot", sa.plot, "Label image (PPM)");

  AlphaArgs aa;
  auto* alpha = app.add_subcommand("alpha", "Shape coherence factor of a mask");
  add_common(alpha, alpha_s);
  alpha->add_option("--mask", aa.mask, "Mask grid (nonzero cells)");
  alpha->add_option("--labels", aa.labels, "Label grid");
  alpha->add_option("--label", aa.label, "Label selected from --labels");
  alpha->add_option("--target", aa.target, "Reference mask B (default: A)");
  option(alpha, alpha_s, "--n-angles", "alpha.n_angles", "Angle scan samples");
  alpha->add_flag("--json", aa.json, "JSON output");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Time a field computation serially and in parallel");
  add_common(bench, bench_s);
  option(bench, bench_s, "--kernel", "field.kernel", "Kernel to time");
  bench->add_option("--repeat", ba.repeat, "Repetitions (best time reported)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (field->parsed()) return cmd_field(field_s, fa, out);
    if (curves->parsed()) return cmd_curves(curves_s, ca, out);
    if (segment->parsed()) return cmd_segment(segment_s, sa, out);
    if (alpha->parsed()) return cmd_alpha(alpha_s, aa, out);
    if (bench->parsed()) return cmd_bench(bench_s, ba, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace ftc::app
