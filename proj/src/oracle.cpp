#include "gbt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gbt::oracle {

Complex monopole_free(double r, double k) {
  if (!(r > 0.0)) throw std::domain_error("monopole_free needs r > 0");
  return std::polar(1.0 / (4.0 * std::numbers::pi * r), k * r);
}

double MonopoleCase::wavenumber() const { return 2.0 * std::numbers::pi * freq_hz / sound_speed; }

Complex image_source_field(const MonopoleCase& mc, const Vec3& observer) {
  if (observer.z() < 0.0) throw std::domain_error("observer below the rigid plane");
  const Vec3 src(mc.source_x, mc.source_y, mc.source_z);
  const Vec3 img(mc.source_x, mc.source_y, -mc.source_z);
  const double k = mc.wavenumber();
  return monopole_free((observer - src).norm(), k) + monopole_free((observer - img).norm(), k);
}

std::vector<double> interference_nulls(const MonopoleCase& mc, double line_z, double x_min,
                                       double x_max) {
  const double k = mc.wavenumber();
  const auto path_difference = [&](double x) {
    const double dx = x - mc.source_x;
    return std::hypot(dx, line_z + mc.source_z) - std::hypot(dx, line_z - mc.source_z);
  };
  // The path difference falls monotonically with |x - x_s|, so each side of
  // the source holds at most one crossing per odd half-wavelength multiple.
  std::vector<double> nulls;
  const auto solve_side = [&](double near, double far) {
    if (near == far) return;
    const double d_near = path_difference(near);
    const double d_far = path_difference(far);
    for (int m = 0;; ++m) {
      const double target = (2 * m + 1) * std::numbers::pi / k;
      if (target > d_near) break;
      if (target < d_far) continue;
      double a = near;
      double b = far;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (path_difference(mid) > target) a = mid; else b = mid;
      }
      nulls.push_back(0.5 * (a + b));
    }
  };
  const double xs = std::clamp(mc.source_x, x_min, x_max);
  solve_side(xs, x_max);
  solve_side(xs, x_min);
  std::sort(nulls.begin(), nulls.end());
  nulls.erase(std::unique(nulls.begin(), nulls.end()), nulls.end());
  return nulls;
}

namespace {

// sqrt(det Q(s)) continued from the principal branch at s = 0 in small steps,
// choosing at each step the root nearer to the previous one.
Complex continued_sqrt_det(const BeamPath& path, double s) {
  const double c = path.sound_speed;
  const auto det_at = [&](double x) { return (path.q0 + (c * x) * path.p0).determinant(); };
  const Complex d0 = det_at(0.0);
  Complex root = std::sqrt(d0);
  if (d0.imag() == 0.0 && d0.real() < 0.0) {
    // Principal value on the cut, taken from the side entered for s > 0.
    const Complex ahead = det_at(1e-9 * std::max(1.0, std::abs(d0)));
    root = std::sqrt(Complex(d0.real(), ahead.imag() < 0.0 ? -0.0 : 0.0));
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(s / 0.25)));
  for (int i = 1; i <= steps; ++i) {
    const Complex next = std::sqrt(det_at(s * i / steps));
    root = (std::abs(next - root) <= std::abs(next + root)) ? next : -next;
  }
  return root;
}

}  // namespace

Complex brute_force_sum(const Vec3& observer, std::span<const BeamPath> paths, double omega,
                        double phi_scale) {
  Complex acc(0.0, 0.0);
  for (const BeamPath& path : paths) {
    // Nearest point over every segment; keep the first on ties.
    double best = std::numeric_limits<double>::infinity();
    const Segment* seg = nullptr;
    double t_best = 0.0;
    bool abeam = false;
    for (const Segment& sg : path.segments) {
      const double t_raw = (observer - sg.origin).dot(sg.direction);
      const double t = std::min(std::max(t_raw, 0.0), sg.length);
      const double d = (observer - (sg.origin + t * sg.direction)).norm();
      if (d < best) {
        best = d;
        seg = &sg;
        t_best = t;
        abeam = t_raw >= 0.0 && t_raw <= sg.length;
      }
    }
    if (!seg || !abeam) continue;

    const double c = path.sound_speed;
    const double s = seg->s_start + t_best;
    const Vec3 offset = observer - (seg->origin + t_best * seg->direction);
    const Eigen::Vector2cd q(Complex(offset.dot(seg->e1)), Complex(offset.dot(seg->e2)));
    const Mat2c qm = path.q0 + (c * s) * path.p0;
    const Complex quad = q.transpose() * (path.p0 * qm.inverse()) * q;
    const Complex i_omega(0.0, omega);
    const Complex field = path.amplitude * std::sqrt(c) / continued_sqrt_det(path, s) *
                          seg->reflection_product *
                          std::exp(i_omega * (s / c) + 0.5 * i_omega * quad);
    acc += (phi_scale * omega / c) * path.weight_dgamma * field;
  }
  return acc;
}

}  // namespace gbt::oracle
