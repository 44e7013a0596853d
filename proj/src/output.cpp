#include "gbt/output.hpp"

#include "gbt/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

namespace gbt {

void write_field_csv(const FieldResult& field, std::ostream& out) {
  out << "x,y,z,freq_hz,re_p,im_p,spl_db\n";
  const std::size_t nf = field.frequencies_hz.size();
  for (std::size_t o = 0; o < field.observers.size(); ++o) {
    const Vec3& r = field.observers[o];
    for (std::size_t f = 0; f < nf; ++f) {
      const std::size_t i = field.index(o, f);
      fmt::print(out, "{},{},{},{},{},{},{}\n", r.x(), r.y(), r.z(), field.frequencies_hz[f],
                 field.pressure[i].real(), field.pressure[i].imag(), field.spl_db[i]);
    }
  }
}

void write_timing_header(std::ostream& out) {
  out << "mode,workers,rays,observers,chunks,rt_s,gbs_s,total_s,rt_share,gbs_share,speedup\n";
}

void write_timing_row(const TimingRow& row, std::ostream& out) {
  const PhaseTimings& t = row.timings;
  fmt::print(out, "{},{},{},{},{},{:.6f},{:.6f},{:.6f},{:.4f},{:.4f},{:.4f}\n", mode_name(row.mode),
             row.workers, row.rays, row.observers, row.chunks, t.rt_seconds, t.gbs_seconds,
             t.total_seconds, t.rt_share, t.gbs_share, t.speedup_vs_baseline);
}

HeatmapInfo emit_heatmap(const FieldResult& field, std::size_t freq_index, std::size_t nu,
                         std::size_t nv, const std::filesystem::path& out_path) {
  if (field.observers.size() != nu * nv) {
    throw InputError("heatmap needs a " + std::to_string(nu) + " x " + std::to_string(nv) +
                     " observer grid, field has " + std::to_string(field.observers.size()) +
                     " observers");
  }
  if (freq_index >= field.frequencies_hz.size()) throw InputError("heatmap frequency index out of range");

  HeatmapInfo info;
  info.spl_min = std::numeric_limits<double>::infinity();
  info.spl_max = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < nu * nv; ++o) {
    const double v = field.spl_db[field.index(o, freq_index)];
    if (std::isfinite(v)) {
      info.spl_min = std::min(info.spl_min, v);
      info.spl_max = std::max(info.spl_max, v);
    } else {
      ++info.nulls;
    }
  }
  if (info.nulls == nu * nv) info.spl_min = info.spl_max = 0.0;

  std::vector<unsigned char> pixels(nu * nv, 0);
  const double span = info.spl_max - info.spl_min;
  for (std::size_t o = 0; o < nu * nv; ++o) {
    const double v = field.spl_db[field.index(o, freq_index)];
    if (!std::isfinite(v)) continue;
    pixels[o] = span > 0.0 ? static_cast<unsigned char>(std::lround(255.0 * (v - info.spl_min) / span))
                           : 128;
  }

  std::ofstream img(out_path, std::ios::binary);
  if (!img) throw InputError("cannot write " + out_path.string());
  img << "P5\n" << nu << " " << nv << "\n255\n";
  img.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));

  std::ofstream side(out_path.string() + ".txt");
  fmt::print(side, "freq_hz {}\nspl_min_db {}\nspl_max_db {}\nnull_points {}\nwidth {}\nheight {}\n",
             field.frequencies_hz[freq_index], info.spl_min, info.spl_max, info.nulls, nu, nv);
  return info;
}

void write_paths_header(std::ostream& out) {
  out << "ray,segment,ox,oy,oz,dx,dy,dz,length,s_start,t_start,r_acc\n";
}

void write_paths_csv(std::span<const BeamPath> paths, std::size_t first_ray, std::ostream& out) {
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (std::size_t s = 0; s < paths[r].segments.size(); ++s) {
      const Segment& g = paths[r].segments[s];
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", first_ray + r, s, g.origin.x(),
                 g.origin.y(), g.origin.z(), g.direction.x(), g.direction.y(), g.direction.z(),
                 g.length, g.s_start, g.t_start, g.reflection_product);
    }
  }
}

std::string run_report_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["config"] = s.config_echo;
  j["scene"] = {{"path", s.scene_path}, {"triangles", s.triangles}};
  const PhaseTimings& t = s.timing.timings;
  j["plan"] = {{"mode", std::string(mode_name(s.timing.mode))},
               {"workers", s.timing.workers},
               {"chunks", s.chunk_sizes},
               {"per_ray_bytes", s.per_ray_bytes}};
  j["counts"] = {{"rays", s.timing.rays}, {"observers", s.timing.observers},
                 {"evaluations", s.evaluations}};
  j["timings"] = {{"rt_s", t.rt_seconds},       {"gbs_s", t.gbs_seconds},
                  {"total_s", t.total_seconds}, {"rt_share", t.rt_share},
                  {"gbs_share", t.gbs_share},   {"speedup", t.speedup_vs_baseline}};
  j["calibration"] = {{"phi_scale", s.calibration},
                      {"direction_spread_db", s.calibration_direction_spread_db},
                      {"frequency_spread_db", s.calibration_frequency_spread_db}};
  j["files"] = s.files;
  return j.dump(2) + "\n";
}

}  // namespace gbt
