// Acceptance checks, one line per criterion: "criterion N: PASS|FAIL ...".
// Usage: gbt_acceptance [N ...]   (no arguments runs all ten)

#include "gbt/commands.hpp"
#include "gbt/oracle.hpp"
#include "support.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>

namespace {

using namespace gbt;

// Tolerances.
constexpr double kC1MaxSeconds = 60.0;
constexpr double kC2MaxSeconds = 300.0;
constexpr double kC3LevelDb = 0.5;
constexpr double kC3DoublingDb = -6.02;
constexpr double kC3DoublingTolDb = 0.1;
constexpr std::size_t kC5Total = 16384;
constexpr std::size_t kC5Cap = 11364;
constexpr double kC6MinGbsShare = 0.90;
constexpr double kC7MinFlatSpeedup = 2.0;
constexpr std::size_t kC7Workers = 4;
constexpr std::size_t kC7Repeats = 5;
constexpr double kC7MinSkew = 10.0;
constexpr double kC9RelTol = 1e-9;

struct Outcome {
  bool pass;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string describe(const ValidationReport& r) {
  return fmt::format("median {:.3f} dB (<= {}), max {:.3f} dB (<= {}), {} of {} points excluded near nulls, {:.1f} s",
                     r.median_error_db, kValidationMedianDb, r.max_error_db, kValidationMaxDb,
                     r.excluded, r.points.size(), r.seconds);
}

Outcome criterion1() {
  const auto cfg = load_config(test::data_dir() / "validation_50hz.cfg");
  const auto r = validate_case(cfg, 50.0);
  const bool fast = r.seconds <= kC1MaxSeconds;
  return {r.pass && fast, "50 Hz, " + std::to_string(cfg.grid.ray_count()) + " rays: " + describe(r) +
                              fmt::format(" (limit {} s)", kC1MaxSeconds)};
}

Outcome criterion2() {
  const auto cfg = load_config(test::data_dir() / "validation_500hz.cfg");
  const auto r = validate_case(cfg, 500.0);
  const bool fast = r.seconds <= kC2MaxSeconds;
  return {r.pass && fast, "500 Hz, " + std::to_string(cfg.grid.ray_count()) + " rays: " + describe(r) +
                              fmt::format(" (limit {} s)", kC2MaxSeconds)};
}

Outcome criterion3() {
  SourceSpec source;
  source.position = Vec3(0.0, 0.0, 0.0);
  source.beam_eps_m = 20.0;
  LaunchGrid grid;
  grid.n_theta = 128;
  grid.n_phi = 128;
  TraceConfig trace;  // 8000 steps of 0.1 ms, about 274 m
  const Atmosphere atm = Atmosphere::from_conditions(20.0, 70.0, 1.0);
  const double f = 500.0;
  const double omega = 2.0 * std::numbers::pi * f;
  const auto paths = trace_free_field(source, grid, trace, atm);
  const std::vector<double> freqs{f};
  const Calibration cal = calibrate(paths, source.position, freqs);
  const GbsParams params{cal.scale, true};

  const std::vector<double> radii{5.0, 10.0, 20.0, 50.0, 100.0};
  double worst_level = 0.0;
  std::map<double, std::vector<double>> level;
  for (const Vec3& u : probe_directions()) {
    for (double r : radii) {
      const double db = spl(sum_at_observer(r * u, paths, omega, params));
      const double ref = spl(oracle::monopole_free(r, omega / atm.sound_speed));
      worst_level = std::max(worst_level, std::abs(db - ref));
      level[r].push_back(db);
    }
  }
  double worst_doubling = 0.0;
  for (double r : {5.0, 10.0, 50.0}) {
    for (std::size_t d = 0; d < level[r].size(); ++d) {
      const double step = level[2 * r][d] - level[r][d];
      worst_doubling = std::max(worst_doubling, std::abs(step - kC3DoublingDb));
    }
  }
  const bool pass = worst_level <= kC3LevelDb && worst_doubling <= kC3DoublingTolDb;
  return {pass, fmt::format("500 Hz, 128x128 rays, 26 directions x r in {{5,10,20,50,100}} m: "
                            "worst |level error| {:.3f} dB (<= {}), worst doubling deviation from "
                            "{} dB {:.3f} (<= {})",
                            worst_level, kC3LevelDb, kC3DoublingDb, worst_doubling, kC3DoublingTolDb)};
}

bool same_bits(const FieldResult& a, const FieldResult& b) {
  return a.pressure.size() == b.pressure.size() &&
         std::memcmp(a.pressure.data(), b.pressure.data(), a.pressure.size() * sizeof(Complex)) == 0 &&
         std::memcmp(a.spl_db.data(), b.spl_db.data(), a.spl_db.size() * sizeof(double)) == 0;
}

Outcome criterion4() {
  test::CityCase city(32, 32, 40, 25, {125.0, 500.0});
  const std::size_t rays = city.input.grid.ray_count();
  const std::vector<ChunkPlan> chunkings{single_chunk(rays), plan_chunks(rays, 512, 1),
                                         plan_chunks(rays, 147, 1)};
  ExecPlan ref_plan;
  const PipelineResult ref = run_pipeline(city.input, ref_plan, chunkings[0]);
  std::size_t runs = 0;
  std::size_t mismatches = 0;
  std::size_t work_mismatches = 0;
  for (Mode mode : {Mode::sequential, Mode::flat, Mode::dynamic}) {
    for (std::size_t w : {1, 2, 4, 8}) {
      for (const ChunkPlan& chunks : chunkings) {
        // Dynamic runs once at the default threshold and once with a small
        // threshold that forces split observers.
        for (std::size_t threshold : {kDefaultSplitThreshold, std::size_t{300}}) {
          if (mode != Mode::dynamic && threshold != kDefaultSplitThreshold) continue;
          ExecPlan plan;
          plan.mode = mode;
          plan.workers = w;
          plan.split_threshold = threshold;
          const PipelineResult r = run_pipeline(city.input, plan, chunks);
          ++runs;
          if (!same_bits(r.field, ref.field)) ++mismatches;
          if (r.evaluations != ref.evaluations) ++work_mismatches;
        }
      }
    }
  }
  return {mismatches == 0 && work_mismatches == 0,
          fmt::format("{} rays x {} observers x 2 freqs, {} runs over modes x workers {{1,2,4,8}} x "
                      "chunks {{1,2,7}}: {} field mismatches, {} work-count mismatches (tolerance 0 bytes)",
                      rays, city.input.observers.size(), runs, mismatches, work_mismatches)};
}

Outcome criterion5() {
  const auto cfg = load_config(test::data_dir() / "free_field.cfg");
  PipelineInput in;
  in.source = cfg.source_spec();
  in.grid = cfg.grid;
  in.trace = cfg.trace;
  in.atmosphere = cfg.atmosphere();
  const std::size_t per_ray = measure_per_ray_bytes(in);
  const ChunkPlan plan = plan_chunks(kC5Total, kC5Cap * per_ray, per_ray);
  const bool pass = plan.chunk_sizes == std::vector<std::size_t>{11364, 5020};
  std::string sizes;
  for (std::size_t s : plan.chunk_sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(s);
  return {pass, fmt::format("{} rays, per-ray {} B, budget {} B -> [{}] (expected [11364,5020])",
                            kC5Total, per_ray, kC5Cap * per_ray, sizes)};
}

Outcome criterion6() {
  test::CityCase city(64, 64, 101, 101);
  const PipelineResult r = run_pipeline(city.input, ExecPlan{});
  const auto& t = r.timings;
  return {t.gbs_share >= kC6MinGbsShare,
          fmt::format("sequential, {} rays, {} observers: rt {:.3f} s, gbs {:.3f} s, gbs_share {:.4f} (>= {})",
                      r.rays, city.input.observers.size(), t.rt_seconds, t.gbs_seconds, t.gbs_share,
                      kC6MinGbsShare)};
}

template <typename F>
double median_seconds(F&& f) {
  std::vector<double> s;
  for (std::size_t i = 0; i < kC7Repeats; ++i) {
    const Stopwatch clock;
    f();
    s.push_back(clock.seconds());
  }
  return median(s);
}

Outcome criterion7() {
  test::CityCase city(64, 64, 50, 40);
  ExecPlan seq;
  ExecPlan flat;
  flat.mode = Mode::flat;
  flat.workers = kC7Workers;
  const double t_seq = median_seconds([&] { run_pipeline(city.input, seq); });
  const double t_flat = median_seconds([&] { run_pipeline(city.input, flat); });
  const double speedup = t_seq / t_flat;

  // Skewed synthetic workload: ten heavy tasks at the front of the range,
  // so the static partition hands all of them to the first worker.
  std::vector<std::size_t> counts(1000, 256);
  for (std::size_t t = 0; t < 10; ++t) counts[t] = 256 * 100;
  std::vector<double> as_double(counts.begin(), counts.end());
  const double skew = *std::max_element(as_double.begin(), as_double.end()) / median(as_double);
  SkewedWorkload work(counts, 8);
  const double t_flat_skew = median_seconds([&] {
    work.reset();
    run_flat(work.tasks(), kC7Workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t t = b; t < e; ++t) work.accumulate(t, 0, work.items(t));
    });
  });
  const double t_dyn_skew = median_seconds([&] {
    work.reset();
    run_dynamic(work, kC7Workers, kDefaultSplitThreshold);
  });
  const bool pass = speedup >= kC7MinFlatSpeedup && skew >= kC7MinSkew && t_dyn_skew <= t_flat_skew;
  return {pass, fmt::format("hardware threads {}; flat x{} speedup {:.2f} (>= {}) on {} rays "
                            "[seq {:.3f} s, flat {:.3f} s]; skewed workload max/median {:.0f}: "
                            "dynamic {:.4f} s vs flat {:.4f} s (medians of {})",
                            omp_get_num_procs(), kC7Workers, speedup, kC7MinFlatSpeedup,
                            city.input.grid.ray_count(), t_seq, t_flat, skew, t_dyn_skew,
                            t_flat_skew, kC7Repeats)};
}

Outcome criterion8() {
  std::size_t beams = 0;
  std::size_t bad = 0;
  for (const auto& [file, f] : {std::pair{"validation_50hz.cfg", 50.0}, std::pair{"validation_500hz.cfg", 500.0}}) {
    const auto r = validate_case(load_config(test::data_dir() / file), f);
    beams += r.beams;
    bad += r.regularity_violations;
  }
  return {bad == 0 && beams > 0,
          fmt::format("{} beams from the 50 Hz and 500 Hz cases sampled every 1 m: {} violations", beams, bad)};
}

Outcome criterion9() {
  const auto tris = test::random_triangles(1000, 9);
  const Scene scene(tris, builtin_materials());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  std::size_t agree = 0;
  std::size_t hits = 0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 o(pos(rng), pos(rng), pos(rng));
    const Vec3 d = test::random_unit(rng);
    const auto a = scene.intersect(o, d, 1e9);
    const auto b = intersect_brute_force(tris, o, d, 1e9);
    if (!a && !b) {
      ++agree;
    } else if (a && b && a->triangle_index == b->triangle_index &&
               std::abs(a->t - b->t) <= kC9RelTol * b->t) {
      ++agree;
      ++hits;
    }
  }
  return {agree == n, fmt::format("{} random rays on {} triangles: {} agree ({} hits), tolerance {} relative",
                                  n, tris.size(), agree, hits, kC9RelTol)};
}

Outcome criterion10() {
  const auto cfg = load_config(test::data_dir() / "validation_50hz.cfg");
  const auto r = validate_case(cfg, 50.0, 1.1);
  return {!r.pass, "sound speed x1.1 at 50 Hz must fail validation: " + describe(r) +
                       (r.pass ? " -> validation passed" : " -> validation failed")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [k, _] : criteria) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cout << "criterion " << k << ": FAIL unknown criterion\n";
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
