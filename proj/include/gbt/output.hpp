#pragma once

// Plot-ready outputs: field and timing CSVs, grayscale SPL heatmaps, path
// diagnostics and the JSON run report.

#include "gbt/config.hpp"
#include "gbt/gbs.hpp"
#include "gbt/parallel.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace gbt {

// x,y,z,freq_hz,re_p,im_p,spl_db; observer-major, frequency-minor.
void write_field_csv(const FieldResult& field, std::ostream& out);

struct TimingRow {
  Mode mode = Mode::sequential;
  std::size_t workers = 1;
  std::size_t rays = 0;
  std::size_t observers = 0;
  std::size_t chunks = 1;
  PhaseTimings timings;
};

void write_timing_header(std::ostream& out);
void write_timing_row(const TimingRow& row, std::ostream& out);

struct HeatmapInfo {
  double spl_min = 0.0;
  double spl_max = 0.0;
  std::size_t nulls = 0;
};

// 8-bit binary PGM (P5) of one frequency's SPL over an nu x nv grid, row j
// of the image = grid row j. Finite levels map linearly from [min, max] to
// [0, 255]; nulls render as 0. A constant field renders as mid grey. Writes
// `out_path` plus a sidecar `<out_path>.txt` holding the scale.
// Throws InputError if the field does not hold nu * nv observers.
HeatmapInfo emit_heatmap(const FieldResult& field, std::size_t freq_index, std::size_t nu,
                         std::size_t nv, const std::filesystem::path& out_path);

// One row per segment: ray,segment,ox,oy,oz,dx,dy,dz,length,s_start,t_start,r_acc.
void write_paths_header(std::ostream& out);
void write_paths_csv(std::span<const BeamPath> paths, std::size_t first_ray, std::ostream& out);

// JSON run report: config echo, timings, chunking, calibration and outputs.
struct RunSummary {
  std::string config_echo;
  std::string scene_path;
  std::size_t triangles = 0;
  TimingRow timing;
  std::vector<std::size_t> chunk_sizes;
  std::size_t per_ray_bytes = 0;
  std::size_t evaluations = 0;
  double calibration = 1.0;
  double calibration_direction_spread_db = 0.0;
  double calibration_frequency_spread_db = 0.0;
  std::vector<std::string> files;
};

std::string run_report_json(const RunSummary& summary);

}  // namespace gbt
