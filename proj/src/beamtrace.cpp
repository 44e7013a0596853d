#include "gbt/beamtrace.hpp"

#include "gbt/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gbt {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 direction_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// (theta-hat, phi-hat) at the launch angles.
void launch_frame(double theta, double phi, Vec3& e1, Vec3& e2) {
  e1 = {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
  e2 = {-std::sin(phi), std::cos(phi), 0.0};
}

Vec3 householder(const Vec3& v, const Vec3& n) { return v - 2.0 * v.dot(n) * n; }

}  // namespace

double sound_speed(double temperature_c) {
  if (!(temperature_c > -273.15)) {
    throw InputError("temperature must be above -273.15 C, got " + std::to_string(temperature_c));
  }
  return 331.3 * std::sqrt(1.0 + temperature_c / 273.15);
}

Atmosphere Atmosphere::from_conditions(double temperature_c, double rel_humidity_pct,
                                       double pressure_atm) {
  return Atmosphere{temperature_c, rel_humidity_pct, pressure_atm, gbt::sound_speed(temperature_c)};
}

double beam_rayleigh_distance(const SourceSpec& source, double c) {
  if (source.beam_eps_m) return *source.beam_eps_m;
  return std::abs(source.beam_param_im) / c;
}

std::vector<LaunchRay> launch_directions(const LaunchGrid& grid) {
  if (grid.n_theta == 0 || grid.n_phi == 0) throw InputError("launch grid needs n_theta, n_phi >= 1");
  if (grid.theta_min_deg < 0.0 || grid.theta_max_deg > 180.0 || grid.phi_min_deg < 0.0 ||
      grid.phi_max_deg > 360.0) {
    throw InputError("launch angles must lie within [0,180] x [0,360] degrees");
  }
  if (!(grid.theta_max_deg > grid.theta_min_deg) || !(grid.phi_max_deg > grid.phi_min_deg)) {
    throw InputError("launch grid spans an empty solid angle");
  }
  const double dtheta = (grid.theta_max_deg - grid.theta_min_deg) * kDeg / grid.n_theta;
  const double dphi = (grid.phi_max_deg - grid.phi_min_deg) * kDeg / grid.n_phi;

  std::vector<LaunchRay> rays;
  rays.reserve(grid.ray_count());
  for (std::size_t i = 0; i < grid.n_theta; ++i) {
    const double theta = grid.theta_min_deg * kDeg + (i + 0.5) * dtheta;
    for (std::size_t j = 0; j < grid.n_phi; ++j) {
      const double phi = grid.phi_min_deg * kDeg + (j + 0.5) * dphi;
      rays.push_back({theta, phi, direction_from_angles(theta, phi), std::sin(theta) * dtheta * dphi});
    }
  }
  return rays;
}

LaunchRay launch_ray_for(const Vec3& direction) {
  const Vec3 d = direction.normalized();
  const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
  const double phi = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
  return {theta, phi, d, 0.0};
}

BeamInit initial_pq(const SourceSpec& source, double c) {
  if (!(source.beam_param_im < 0.0)) throw InputError("beam parameter Im(b) must be negative");
  const double eps = beam_rayleigh_distance(source, c);
  if (!(eps > 0.0)) throw InputError("beam Rayleigh distance must be positive");
  BeamInit init;
  init.p0 = Mat2c::Identity() / c;
  init.q0 = Complex(0.0, -eps) * Mat2c::Identity();
  return init;
}

SqrtDetQ::SqrtDetQ(const Mat2c& p0, const Mat2c& q0, double c) {
  const Mat2c m = c * p0;
  a_ = m.determinant();
  b_ = q0(0, 0) * m(1, 1) + m(0, 0) * q0(1, 1) - q0(0, 1) * m(1, 0) - m(0, 1) * q0(1, 0);
  c0_ = q0.determinant();

  if (a_ != Complex(0.0, 0.0)) {
    degree_ = 2;
    lead_ = a_;
    const Complex disc = std::sqrt(b_ * b_ - 4.0 * a_ * c0_);
    // Pick the sign that avoids cancellation.
    const Complex q = (std::real(std::conj(b_) * disc) >= 0.0) ? -0.5 * (b_ + disc)
                                                               : -0.5 * (b_ - disc);
    root0_ = q / a_;
    root1_ = (q != Complex(0.0, 0.0)) ? c0_ / q : root0_;
  } else if (b_ != Complex(0.0, 0.0)) {
    degree_ = 1;
    lead_ = b_;
    root0_ = -c0_ / b_;
  } else {
    degree_ = 0;
    lead_ = c0_;
  }

  double principal = std::arg(c0_);
  if (std::imag(c0_) == 0.0 && std::real(c0_) < 0.0) {
    // On the cut: take the side the curve enters for s > 0.
    principal = std::imag(b_) < 0.0 ? -std::numbers::pi : std::numbers::pi;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  offset_ = two_pi * std::round((principal - phase(0.0)) / two_pi);
}

double SqrtDetQ::phase(double s) const {
  double ph = std::arg(lead_);
  if (degree_ >= 1) ph += std::arg(Complex(s, 0.0) - root0_);
  if (degree_ == 2) ph += std::arg(Complex(s, 0.0) - root1_);
  return ph;
}

Complex SqrtDetQ::det(double s) const { return (a_ * s + b_) * s + c0_; }

Complex SqrtDetQ::sqrt_det(double s) const {
  return std::polar(std::sqrt(std::abs(det(s))), 0.5 * (phase(s) + offset_));
}

BeamPath trace(const Scene& scene, const SourceSpec& source, const LaunchRay& ray,
               const TraceConfig& cfg, const Atmosphere& atmosphere) {
  const double c = atmosphere.sound_speed;
  const BeamInit init = initial_pq(source, c);

  BeamPath path;
  path.gamma1 = ray.gamma1;
  path.gamma2 = ray.gamma2;
  path.weight_dgamma = ray.weight_dgamma;
  path.amplitude = source.amplitude_phi;
  path.sound_speed = c;
  path.p0 = init.p0;
  path.q0 = init.q0;
  path.sqrt_det_q = SqrtDetQ(init.p0, init.q0, c);

  Vec3 origin = source.position;
  Vec3 dir = ray.direction.normalized();
  Vec3 e1, e2;
  launch_frame(ray.gamma1, ray.gamma2, e1, e2);
  // Re-project in case the direction did not come from the launch angles.
  e1 = (e1 - e1.dot(dir) * dir).normalized();
  e2 = (e2 - e2.dot(dir) * dir - e2.dot(e1) * e1).normalized();

  const double total = cfg.max_path_length(c);
  double s = 0.0;
  double r_acc = 1.0;

  while (s < total) {
    const double remaining = total - s;
    const auto hit = scene.intersect(origin, dir, remaining);
    Segment seg{origin, dir, e1, e2, hit ? hit->t : remaining, s, s / c, r_acc};
    path.segments.push_back(seg);
    s += seg.length;
    // A ray that meets nothing has left the scene: its last segment carries
    // the residual length.
    if (!hit || path.n_reflections == cfg.r_max) break;

    const Vec3& n = hit->normal;
    origin = hit->point;
    dir = householder(dir, n).normalized();
    e1 = householder(e1, n);
    e2 = householder(e2, n);
    e1 = (e1 - e1.dot(dir) * dir).normalized();
    e2 = (e2 - e2.dot(dir) * dir - e2.dot(e1) * e1).normalized();
    r_acc *= scene.reflection_coefficient(hit->triangle_index);
    ++path.n_reflections;
  }
  return path;
}

Mat2c q_at(const BeamPath& path, double s, double c) {
  if (s < 0.0 || s > path.total_length()) {
    throw std::out_of_range("arc length " + std::to_string(s) + " outside the path");
  }
  return path.q0 + c * path.p0 * s;
}

double travel_time(const BeamPath& path, double s) {
  if (s < 0.0 || s > path.total_length()) {
    throw std::out_of_range("arc length " + std::to_string(s) + " outside the path");
  }
  return s / path.sound_speed;
}

namespace {

template <typename T>
void put(std::vector<unsigned char>& out, const T& value) {
  const auto* p = reinterpret_cast<const unsigned char*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

void put(std::vector<unsigned char>& out, const Vec3& v) {
  for (int i = 0; i < 3; ++i) put(out, v[i]);
}

void put(std::vector<unsigned char>& out, const Mat2c& m) {
  for (int i = 0; i < 4; ++i) put(out, m.data()[i]);
}

}  // namespace

std::vector<unsigned char> serialize(const BeamPath& path) {
  std::vector<unsigned char> out;
  put(out, path.gamma1);
  put(out, path.gamma2);
  put(out, path.weight_dgamma);
  put(out, path.amplitude);
  put(out, path.sound_speed);
  put(out, path.p0);
  put(out, path.q0);
  put(out, static_cast<std::uint64_t>(path.n_reflections));
  put(out, static_cast<std::uint64_t>(path.segments.size()));
  for (const auto& seg : path.segments) {
    put(out, seg.origin);
    put(out, seg.direction);
    put(out, seg.e1);
    put(out, seg.e2);
    put(out, seg.length);
    put(out, seg.s_start);
    put(out, seg.t_start);
    put(out, seg.reflection_product);
  }
  return out;
}

}  // namespace gbt
