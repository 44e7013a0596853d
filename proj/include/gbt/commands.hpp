#pragma once

// validate / run / bench workflows behind the command-line tool.

#include "gbt/config.hpp"
#include "gbt/gbs.hpp"
#include "gbt/output.hpp"
#include "gbt/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace gbt {

// Samples s = 0, step, 2 step, ... and the path end; counts the samples where
// det Q = 0 or Im(P Q^-1) is not positive definite.
std::size_t regularity_violations(const BeamPath& path, double step = 1.0);

// Free-field calibration for the case: full-sphere launch with the
// calibration grid, probes at kCalibrationRadius, at calib_freqs_hz (or
// freqs_hz when unset).
Calibration calibrate_case(const CaseConfig& cfg, const Atmosphere& atmosphere);

inline constexpr double kValidationMedianDb = 1.0;
inline constexpr double kValidationMaxDb = 3.0;
inline constexpr double kNullExclusionWavelengths = 0.1;

struct ValidationPoint {
  Vec3 position;
  double spl_gbt = 0.0;
  double spl_ref = 0.0;
  double error_db = 0.0;
  bool excluded = false;
};

struct ValidationReport {
  double freq_hz = 0.0;
  double c_scale = 1.0;
  std::vector<ValidationPoint> points;
  std::vector<double> predicted_nulls;
  double median_error_db = 0.0;
  double max_error_db = 0.0;
  std::size_t excluded = 0;
  std::size_t beams = 0;
  std::size_t regularity_violations = 0;
  double calibration = 1.0;
  double seconds = 0.0;
  bool pass = false;
};

// GBT over a rigid ground plane vs. the image-source oracle on the probe
// line. c_scale multiplies the solver's sound speed (the oracle keeps the
// true value), which is how the negative control detunes the field.
ValidationReport validate_case(const CaseConfig& cfg, double freq_hz, double c_scale = 1.0);

// x,y,z,freq_hz,spl_gbt,spl_ref,error_db,excluded
void write_validation_csv(const ValidationReport& report, std::ostream& out);
void write_validation_summary(const ValidationReport& report, std::ostream& out);

struct RunOptions {
  std::optional<Mode> mode;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> chunk_budget;
  bool paths_csv = false;
};

// Full pipeline; writes field.csv, timing.csv, report.json, a heatmap per
// frequency when observers form a grid, and paths.csv on request.
RunSummary run_case(const CaseConfig& cfg, const std::filesystem::path& scene_path,
                    const std::filesystem::path& out_dir, const RunOptions& options);

// Scene for the case: the file filtered by the config's category counts, or
// an empty scene when the path is empty.
Scene load_case_scene(const CaseConfig& cfg, const std::filesystem::path& scene_path);

// n_theta x n_phi with n_theta the largest divisor of rays not above sqrt(rays).
LaunchGrid grid_for_rays(const LaunchGrid& base, std::size_t rays);

// One timing row per (rays, mode, workers) cell; speedups against a
// sequential run at the same ray count. Rows are also streamed to `csv`.
std::vector<TimingRow> bench_case(const CaseConfig& cfg, const Scene& scene,
                                  const std::vector<std::size_t>& rays,
                                  const std::vector<Mode>& modes,
                                  const std::vector<std::size_t>& workers, std::ostream& csv);

}  // namespace gbt
