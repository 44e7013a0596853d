#pragma once

// Flat key=value case configuration: atmosphere, source, launch grid, observers
// and execution plan.

#include "gbt/beamtrace.hpp"
#include "gbt/parallel.hpp"
#include "gbt/scene.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gbt {

// Regular observer grid: origin + i*u + j*v, i < nu, j < nv, row-major (j outer).
struct ObserverGrid {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
  std::size_t nu = 1;
  std::size_t nv = 1;

  std::size_t count() const { return nu * nv; }
  std::vector<Vec3> points() const;
};

// Validation probe line: y = 0, z = z, x from x_min to x_max inclusive.
struct ProbeLine {
  double x_min = -30.0;
  double x_max = 30.0;
  double z = 10.0;
  std::size_t n = 121;

  std::vector<Vec3> points() const;
};

struct CaseConfig {
  double ta_c = 20.0;
  double hr_pct = 70.0;
  double pa_atm = 1.0;
  std::vector<double> freqs_hz;
  double im_b = -45874.0;
  std::optional<double> beam_eps_m;
  double amplitude_phi = 1.0;
  CategoryFilter categories;
  int dim = 3;
  LaunchGrid grid;
  TraceConfig trace;
  std::size_t n_obs = 0;
  Vec3 source = Vec3::Zero();
  std::optional<ObserverGrid> obs_grid;
  std::optional<std::string> obs_file;  // resolved against the config's directory
  ExecPlan plan;
  ProbeLine probe;
  std::size_t calib_n_theta = 128;
  std::size_t calib_n_phi = 128;
  std::vector<double> calib_freqs_hz;  // empty = freqs_hz
  std::filesystem::path base_dir;      // directory of the config file, not echoed

  Atmosphere atmosphere() const;
  SourceSpec source_spec() const;
  // Grid points, or the observer file's points. Checks the count against n_obs.
  std::vector<Vec3> observers() const;
};

// Strict parse: unknown or repeated keys, missing required keys and
// out-of-range values throw InputError naming the key and line.
CaseConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
CaseConfig load_config(const std::filesystem::path& path);

// Canonical key=value text; parse(echo(c)) echoes identically.
std::string echo_config(const CaseConfig& cfg);

// Observer file: one "x y z" per line (commas allowed), '#' comments.
std::vector<Vec3> load_observers(const std::filesystem::path& path);

}  // namespace gbt
