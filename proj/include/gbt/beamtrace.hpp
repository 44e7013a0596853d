#pragma once

// Ray-tracing phase: launch grid, specular marching through the scene and the
// dynamic-ray quantities (P, Q) carried by each beam.

#include "gbt/geometry.hpp"
#include "gbt/scene.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace gbt {

using Complex = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

// c = 331.3 * sqrt(1 + T / 273.15) m/s. Throws InputError at or below absolute zero.
double sound_speed(double temperature_c);

struct Atmosphere {
  double temperature_c = 20.0;
  double rel_humidity_pct = 70.0;  // stored, no absorption model
  double pressure_atm = 1.0;       // stored, no absorption model
  double sound_speed = 0.0;

  static Atmosphere from_conditions(double temperature_c, double rel_humidity_pct,
                                    double pressure_atm);
};

struct SourceSpec {
  Vec3 position = Vec3::Zero();
  std::vector<double> frequencies_hz;
  double amplitude_phi = 1.0;
  double beam_param_im = -45874.0;
  // Beam Rayleigh distance in metres. When unset it is derived from
  // beam_param_im (taken in m^2/s) as |Im b| / c.
  std::optional<double> beam_eps_m;
};

// Rayleigh distance eps of the launched beams, i.e. Q0 = -i eps I.
double beam_rayleigh_distance(const SourceSpec& source, double c);

struct LaunchGrid {
  double theta_min_deg = 0.0;
  double theta_max_deg = 180.0;
  double phi_min_deg = 0.0;
  double phi_max_deg = 360.0;
  std::size_t n_theta = 64;
  std::size_t n_phi = 64;

  std::size_t ray_count() const { return n_theta * n_phi; }
};

struct LaunchRay {
  double gamma1 = 0.0;  // polar angle from +z, radians
  double gamma2 = 0.0;  // azimuth, radians
  Vec3 direction = Vec3::UnitZ();
  double weight_dgamma = 0.0;  // sin(theta) dtheta dphi, steradians
};

// Cell-centred uniform theta x phi grid, ray index = i_theta * n_phi + i_phi.
std::vector<LaunchRay> launch_directions(const LaunchGrid& grid);

// Launch ray for an arbitrary unit direction (weight 0); used by diagnostics and tests.
LaunchRay launch_ray_for(const Vec3& direction);

struct BeamInit {
  Mat2c p0;
  Mat2c q0;
};

// P0 = I / c, Q0 = -i eps I. Im(P0 Q0^-1) = I / (c eps) is positive definite.
BeamInit initial_pq(const SourceSpec& source, double c);

// Continuous square root of det Q(s) = det(Q0 + c P0 s) along the ray.
// det Q(s) is a polynomial of degree <= 2 in s; its continuous argument is
// arg(lead) + sum arg(s - root), which never jumps for real s because the
// roots are off the real axis whenever det Q has no real zero. The 2 pi
// offset makes the branch principal at s = 0.
class SqrtDetQ {
 public:
  SqrtDetQ() = default;
  SqrtDetQ(const Mat2c& p0, const Mat2c& q0, double c);

  Complex det(double s) const;
  Complex sqrt_det(double s) const;

 private:
  double phase(double s) const;

  Complex a_{0.0, 0.0};  // s^2 coefficient
  Complex b_{0.0, 0.0};  // s coefficient
  Complex c0_{0.0, 0.0};
  int degree_ = 0;
  Complex lead_{0.0, 0.0};
  Complex root0_{0.0, 0.0};
  Complex root1_{0.0, 0.0};
  double offset_ = 0.0;
};

struct TraceConfig {
  std::size_t n_steps = 8000;
  double dt = 1e-4;
  std::size_t r_max = 10;

  double max_path_length(double c) const { return c * static_cast<double>(n_steps) * dt; }
};

struct Segment {
  Vec3 origin;
  Vec3 direction;  // unit
  Vec3 e1, e2;     // ray-centred frame, orthonormal and normal to direction
  double length = 0.0;
  double s_start = 0.0;
  double t_start = 0.0;
  double reflection_product = 1.0;  // product of coefficients of the reflections before this segment
};

struct BeamPath {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double weight_dgamma = 0.0;
  double amplitude = 1.0;  // phi
  double sound_speed = 0.0;
  Mat2c p0 = Mat2c::Zero();
  Mat2c q0 = Mat2c::Zero();
  SqrtDetQ sqrt_det_q;
  std::size_t n_reflections = 0;
  std::vector<Segment> segments;

  double total_length() const {
    return segments.empty() ? 0.0 : segments.back().s_start + segments.back().length;
  }
};

BeamPath trace(const Scene& scene, const SourceSpec& source, const LaunchRay& ray,
               const TraceConfig& cfg, const Atmosphere& atmosphere);

// Q(s) = Q0 + c P0 s. Throws std::out_of_range outside [0, total length].
Mat2c q_at(const BeamPath& path, double s, double c);
// T(s) = s / c for a homogeneous medium.
double travel_time(const BeamPath& path, double s);

// Flat binary encoding of a path, used to size chunks against a memory budget.
std::vector<unsigned char> serialize(const BeamPath& path);

}  // namespace gbt
