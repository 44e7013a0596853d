#include "gbt/gbs.hpp"

#include "gbt/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace gbt {

PathPoint nearest_on_path(const Vec3& observer, const BeamPath& path) {
  PathPoint best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const Segment& seg = path.segments[i];
    const Vec3 u = observer - seg.origin;
    const double t = u.dot(seg.direction);
    const double tc = std::clamp(t, 0.0, seg.length);
    const Vec3 diff = u - tc * seg.direction;
    const double d2 = diff.squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.segment = i;
      best.s_star = seg.s_start + tc;
      best.q = {diff.dot(seg.e1), diff.dot(seg.e2)};
      best.abeam = (t >= 0.0 && t <= seg.length);
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

namespace {

// Everything about one (observer, beam) pair that does not depend on frequency.
struct BeamGeometry {
  Complex quad;       // q^T P Q^-1 q
  Complex amplitude;  // phi sqrt(c / det Q) r_acc
  double travel_time;
};

bool positive_definite_imag(const Mat2c& m) {
  const double a = m(0, 0).imag();
  const double d = m(1, 1).imag();
  const double b = 0.5 * (m(0, 1).imag() + m(1, 0).imag());
  return a > 0.0 && a * d - b * b > 0.0;
}

BeamGeometry beam_geometry(const BeamPath& path, const PathPoint& point) {
  const double c = path.sound_speed;
  const double s = point.s_star;
  const Mat2c q = path.q0 + (c * s) * path.p0;
  const Complex det = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
  if (det == Complex(0.0, 0.0)) {
    throw DegenerateBeamError("det Q vanishes at s = " + std::to_string(s));
  }
  Mat2c q_inv;
  q_inv << q(1, 1) / det, -q(0, 1) / det, -q(1, 0) / det, q(0, 0) / det;
  const Mat2c m = path.p0 * q_inv;
  if (!positive_definite_imag(m)) {
    throw DegenerateBeamError("Im(P Q^-1) not positive definite at s = " + std::to_string(s));
  }
  const Eigen::Vector2cd qv = point.q.cast<Complex>();
  BeamGeometry g;
  g.quad = qv.transpose() * m * qv;
  g.amplitude = path.amplitude * std::sqrt(c) / path.sqrt_det_q.sqrt_det(s) *
                path.segments[point.segment].reflection_product;
  g.travel_time = s / c;
  return g;
}

Complex pressure_at(const BeamGeometry& g, double omega) {
  const Complex i_omega(0.0, omega);
  return g.amplitude * std::exp(i_omega * g.travel_time + 0.5 * i_omega * g.quad);
}

// Writes each frequency's weighted term, or an exact zero when skipped.
std::size_t beam_terms(const Vec3& observer, const BeamPath& path,
                       std::span<const double> omegas, const GbsParams& params,
                       std::span<Complex> out) {
  std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
  if (path.segments.empty()) return 0;
  const PathPoint point = nearest_on_path(observer, path);
  if (!point.abeam) return 0;
  const BeamGeometry g = beam_geometry(path, point);
  std::size_t evaluated = 0;
  for (std::size_t f = 0; f < omegas.size(); ++f) {
    const double omega = omegas[f];
    if (params.cutoff && -0.5 * omega * g.quad.imag() < kCutoffExponent) continue;
    const double phi = params.phi_scale * omega / path.sound_speed;
    out[f] = (phi * path.weight_dgamma) * pressure_at(g, omega);
    ++evaluated;
  }
  return evaluated;
}

}  // namespace

Complex beam_pressure(const BeamPath& path, const PathPoint& point, double omega) {
  return pressure_at(beam_geometry(path, point), omega);
}

double gaussian_exponent(const BeamPath& path, const PathPoint& point, double omega) {
  return -0.5 * omega * beam_geometry(path, point).quad.imag();
}

bool beam_regular(const BeamPath& path, double s) {
  const Mat2c q = path.q0 + (path.sound_speed * s) * path.p0;
  const Complex det = q.determinant();
  if (det == Complex(0.0, 0.0)) return false;
  return positive_definite_imag(path.p0 * q.inverse());
}

std::size_t evaluate_beam(const Vec3& observer, const BeamPath& path,
                          std::span<const double> omegas, const GbsParams& params,
                          std::span<Complex> out) {
  return beam_terms(observer, path, omegas, params, out);
}

std::size_t accumulate_beam(const Vec3& observer, const BeamPath& path,
                            std::span<const double> omegas, const GbsParams& params,
                            std::span<Complex> acc) {
  constexpr std::size_t kMaxInline = 16;
  std::array<Complex, kMaxInline> inline_terms;
  std::vector<Complex> heap_terms;
  std::span<Complex> terms;
  if (omegas.size() <= kMaxInline) {
    terms = std::span<Complex>(inline_terms.data(), omegas.size());
  } else {
    heap_terms.resize(omegas.size());
    terms = heap_terms;
  }
  const std::size_t evaluated = beam_terms(observer, path, omegas, params, terms);
  for (std::size_t f = 0; f < terms.size(); ++f) {
    // Exact zeros are never added, on every path, so that folding a buffer of
    // terms later reproduces the direct accumulation bit for bit.
    if (terms[f] != Complex(0.0, 0.0)) acc[f] += terms[f];
  }
  return evaluated;
}

Complex sum_at_observer(const Vec3& observer, std::span<const BeamPath> paths, double omega,
                        const GbsParams& params) {
  Complex acc(0.0, 0.0);
  const double omegas[1] = {omega};
  for (const BeamPath& path : paths) {
    accumulate_beam(observer, path, omegas, params, std::span<Complex>(&acc, 1));
  }
  return acc;
}

double spl(Complex pressure) {
  const double mag = std::abs(pressure);
  if (mag == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(mag / kReferencePressure);
}

std::vector<Vec3> probe_directions() {
  std::vector<Vec3> dirs;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      for (int z = -1; z <= 1; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        dirs.push_back(Vec3(x, y, z).normalized());
      }
    }
  }
  return dirs;
}

double calibrate_phi(std::span<const BeamPath> paths, const Vec3& source, double omega,
                     double* direction_spread_db) {
  if (paths.empty()) throw InputError("calibration needs at least one beam");
  for (const auto& p : paths) {
    if (p.n_reflections != 0) {
      throw InputError("calibration probes lie inside scene geometry (paths are not free-field)");
    }
  }
  const double target = 1.0 / (4.0 * std::numbers::pi * kCalibrationRadius);
  std::vector<double> level_db;
  for (const Vec3& u : probe_directions()) {
    const Complex p = sum_at_observer(source + kCalibrationRadius * u, paths, omega, {1.0, true});
    level_db.push_back(20.0 * std::log10(std::abs(p) / target));
  }
  const auto [lo, hi] = std::minmax_element(level_db.begin(), level_db.end());
  const double spread = *hi - *lo;
  if (direction_spread_db) *direction_spread_db = spread;
  if (!std::isfinite(spread) || spread > 1.0) {
    throw InputError("calibration did not converge: " + std::to_string(spread) +
                     " dB spread over probe directions");
  }
  const double mean_db = std::accumulate(level_db.begin(), level_db.end(), 0.0) / level_db.size();
  return std::pow(10.0, -mean_db / 20.0);
}

Calibration calibrate(std::span<const BeamPath> paths, const Vec3& source,
                      std::span<const double> frequencies_hz, double max_frequency_spread_db) {
  if (frequencies_hz.empty()) throw InputError("calibration needs at least one frequency");
  Calibration cal;
  double log_sum = 0.0;
  for (double f : frequencies_hz) {
    double spread = 0.0;
    const double scale = calibrate_phi(paths, source, 2.0 * std::numbers::pi * f, &spread);
    cal.per_frequency.push_back(scale);
    cal.direction_spread_db = std::max(cal.direction_spread_db, spread);
    log_sum += std::log(scale);
  }
  cal.scale = std::exp(log_sum / frequencies_hz.size());
  const auto [lo, hi] = std::minmax_element(cal.per_frequency.begin(), cal.per_frequency.end());
  cal.frequency_spread_db = 20.0 * std::log10(*hi / *lo);
  if (cal.frequency_spread_db > max_frequency_spread_db) {
    throw InputError("calibration scale varies by " + std::to_string(cal.frequency_spread_db) +
                     " dB across frequencies");
  }
  return cal;
}

}  // namespace gbt
