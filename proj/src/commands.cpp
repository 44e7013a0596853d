#include "gbt/commands.hpp"

#include "gbt/citygen.hpp"
#include "gbt/error.hpp"
#include "gbt/oracle.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>

namespace gbt {

std::size_t regularity_violations(const BeamPath& path, double step) {
  const double total = path.total_length();
  std::size_t bad = 0;
  const auto n = static_cast<std::size_t>(std::floor(total / step));
  for (std::size_t i = 0; i <= n; ++i) {
    if (!beam_regular(path, static_cast<double>(i) * step)) ++bad;
  }
  if (static_cast<double>(n) * step < total && !beam_regular(path, total)) ++bad;
  return bad;
}

Calibration calibrate_case(const CaseConfig& cfg, const Atmosphere& atmosphere) {
  LaunchGrid sphere;
  sphere.n_theta = cfg.calib_n_theta;
  sphere.n_phi = cfg.calib_n_phi;
  const SourceSpec source = cfg.source_spec();
  const auto paths = trace_free_field(source, sphere, cfg.trace, atmosphere);
  const auto& freqs = cfg.calib_freqs_hz.empty() ? cfg.freqs_hz : cfg.calib_freqs_hz;
  return calibrate(paths, source.position, freqs);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ValidationReport validate_case(const CaseConfig& cfg, double freq_hz, double c_scale) {
  if (!(freq_hz > 0.0)) throw InputError("validation frequency must be positive");
  if (!(c_scale > 0.0)) throw InputError("sound-speed scale must be positive");
  if (!(cfg.source.z() > 0.0)) throw InputError("validation source must lie above the ground plane");
  const Stopwatch clock;

  const Atmosphere truth = cfg.atmosphere();
  Atmosphere solver = truth;
  solver.sound_speed *= c_scale;

  ValidationReport rep;
  rep.freq_hz = freq_hz;
  rep.c_scale = c_scale;
  const Calibration cal = calibrate_case(cfg, solver);
  rep.calibration = cal.scale;

  const Scene ground = build_scene(ground_plane(cfg.trace.max_path_length(solver.sound_speed)));
  PipelineInput in;
  in.scene = &ground;
  in.source = cfg.source_spec();
  in.source.frequencies_hz = {freq_hz};
  in.grid = cfg.grid;
  in.trace = cfg.trace;
  in.atmosphere = solver;
  in.observers = cfg.probe.points();
  in.phi_scale = cal.scale;
  std::mutex m;
  in.inspect = [&](std::span<const BeamPath> paths, std::size_t) {
    std::size_t bad = 0;
    for (const auto& p : paths) bad += regularity_violations(p);
    std::lock_guard lock(m);
    rep.beams += paths.size();
    rep.regularity_violations += bad;
  };
  const PipelineResult res = run_pipeline(in, cfg.plan);

  oracle::MonopoleCase mc;
  mc.source_x = cfg.source.x();
  mc.source_y = cfg.source.y();
  mc.source_z = cfg.source.z();
  mc.freq_hz = freq_hz;
  mc.sound_speed = truth.sound_speed;
  rep.predicted_nulls = oracle::interference_nulls(mc, cfg.probe.z, cfg.probe.x_min, cfg.probe.x_max);
  const double guard = kNullExclusionWavelengths * truth.sound_speed / freq_hz;

  std::vector<double> errors;
  for (std::size_t o = 0; o < in.observers.size(); ++o) {
    ValidationPoint pt;
    pt.position = in.observers[o];
    pt.spl_gbt = res.field.spl_db[res.field.index(o, 0)];
    pt.spl_ref = spl(oracle::image_source_field(mc, pt.position));
    pt.error_db = std::abs(pt.spl_gbt - pt.spl_ref);
    for (double x : rep.predicted_nulls) {
      if (std::abs(pt.position.x() - x) <= guard) pt.excluded = true;
    }
    if (!std::isfinite(pt.spl_gbt) || !std::isfinite(pt.spl_ref)) pt.excluded = true;
    if (pt.excluded) {
      ++rep.excluded;
    } else {
      errors.push_back(pt.error_db);
    }
    rep.points.push_back(pt);
  }
  rep.median_error_db = median(errors);
  rep.max_error_db = errors.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : *std::max_element(errors.begin(), errors.end());
  rep.pass = !errors.empty() && rep.median_error_db <= kValidationMedianDb &&
             rep.max_error_db <= kValidationMaxDb;
  rep.seconds = clock.seconds();
  return rep;
}

void write_validation_csv(const ValidationReport& rep, std::ostream& out) {
  out << "x,y,z,freq_hz,spl_gbt,spl_ref,error_db,excluded\n";
  for (const auto& p : rep.points) {
    fmt::print(out, "{},{},{},{},{:.6f},{:.6f},{:.6f},{}\n", p.position.x(), p.position.y(),
               p.position.z(), rep.freq_hz, p.spl_gbt, p.spl_ref, p.error_db, p.excluded ? 1 : 0);
  }
}

void write_validation_summary(const ValidationReport& rep, std::ostream& out) {
  fmt::print(out,
             "freq_hz={} c_scale={} points={} excluded={} median_db={:.3f} max_db={:.3f} "
             "beams={} regularity_violations={} phi_scale={:.6g} seconds={:.2f} result={}\n",
             rep.freq_hz, rep.c_scale, rep.points.size(), rep.excluded, rep.median_error_db,
             rep.max_error_db, rep.beams, rep.regularity_violations, rep.calibration, rep.seconds,
             rep.pass ? "PASS" : "FAIL");
}

Scene load_case_scene(const CaseConfig& cfg, const std::filesystem::path& scene_path) {
  if (scene_path.empty()) return Scene();
  return load_scene(scene_path, cfg.categories);
}

RunSummary run_case(const CaseConfig& cfg, const std::filesystem::path& scene_path,
                    const std::filesystem::path& out_dir, const RunOptions& options) {
  ExecPlan plan = cfg.plan;
  if (options.mode) plan.mode = *options.mode;
  if (options.workers) plan.workers = *options.workers;
  if (options.chunk_budget) plan.memory_budget = *options.chunk_budget;
  plan.validate();

  const Scene scene = load_case_scene(cfg, scene_path);
  const Atmosphere atm = cfg.atmosphere();
  const Calibration cal = calibrate_case(cfg, atm);

  std::filesystem::create_directories(out_dir);
  RunSummary summary;

  PipelineInput in;
  in.scene = &scene;
  in.source = cfg.source_spec();
  in.grid = cfg.grid;
  in.trace = cfg.trace;
  in.atmosphere = atm;
  in.observers = cfg.observers();
  in.phi_scale = cal.scale;
  std::ofstream paths_out;
  if (options.paths_csv) {
    paths_out.open(out_dir / "paths.csv");
    write_paths_header(paths_out);
    in.inspect = [&](std::span<const BeamPath> paths, std::size_t first) {
      write_paths_csv(paths, first, paths_out);
    };
    summary.files.push_back("paths.csv");
  }
  const PipelineResult res = run_pipeline(in, plan);

  {
    std::ofstream f(out_dir / "field.csv");
    write_field_csv(res.field, f);
    if (!f) throw InputError("cannot write " + (out_dir / "field.csv").string());
    summary.files.push_back("field.csv");
  }
  summary.timing = {plan.mode, plan.workers, res.rays, in.observers.size(), res.chunks.n_chunks(),
                    res.timings};
  {
    std::ofstream f(out_dir / "timing.csv");
    write_timing_header(f);
    write_timing_row(summary.timing, f);
    summary.files.push_back("timing.csv");
  }
  if (cfg.obs_grid) {
    for (std::size_t k = 0; k < res.field.frequencies_hz.size(); ++k) {
      const std::string name = fmt::format("spl_{}hz.pgm", res.field.frequencies_hz[k]);
      emit_heatmap(res.field, k, cfg.obs_grid->nu, cfg.obs_grid->nv, out_dir / name);
      summary.files.push_back(name);
      summary.files.push_back(name + ".txt");
    }
  }

  summary.config_echo = echo_config(cfg);
  summary.scene_path = scene_path.string();
  summary.triangles = scene.triangles().size();
  summary.chunk_sizes = res.chunks.chunk_sizes;
  summary.per_ray_bytes = res.per_ray_bytes;
  summary.evaluations = res.evaluations;
  summary.calibration = cal.scale;
  summary.calibration_direction_spread_db = cal.direction_spread_db;
  summary.calibration_frequency_spread_db = cal.frequency_spread_db;
  summary.files.push_back("report.json");
  std::ofstream(out_dir / "report.json") << run_report_json(summary);
  return summary;
}

LaunchGrid grid_for_rays(const LaunchGrid& base, std::size_t rays) {
  if (rays == 0) throw InputError("ray count must be positive");
  std::size_t a = static_cast<std::size_t>(std::sqrt(static_cast<double>(rays)));
  while (a > 1 && (rays % a != 0 || a * a > rays)) --a;
  LaunchGrid g = base;
  g.n_theta = a;
  g.n_phi = rays / a;
  return g;
}

std::vector<TimingRow> bench_case(const CaseConfig& cfg, const Scene& scene,
                                  const std::vector<std::size_t>& rays,
                                  const std::vector<Mode>& modes,
                                  const std::vector<std::size_t>& workers, std::ostream& csv) {
  PipelineInput in;
  in.scene = &scene;
  in.source = cfg.source_spec();
  in.trace = cfg.trace;
  in.atmosphere = cfg.atmosphere();
  in.observers = cfg.observers();

  std::vector<TimingRow> rows;
  write_timing_header(csv);
  for (std::size_t n : rays) {
    in.grid = grid_for_rays(cfg.grid, n);
    ExecPlan seq = cfg.plan;
    seq.mode = Mode::sequential;
    seq.workers = 1;
    const PipelineResult base = run_pipeline(in, seq);
    const double baseline = base.timings.total_seconds;
    for (Mode mode : modes) {
      for (std::size_t w : workers) {
        if (mode == Mode::sequential && w != workers.front()) continue;
        ExecPlan plan = cfg.plan;
        plan.mode = mode;
        plan.workers = mode == Mode::sequential ? 1 : w;
        const PipelineResult r = run_pipeline(in, plan, std::nullopt, baseline);
        TimingRow row{mode, plan.workers, r.rays, in.observers.size(), r.chunks.n_chunks(), r.timings};
        write_timing_row(row, csv);
        csv.flush();
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace gbt
