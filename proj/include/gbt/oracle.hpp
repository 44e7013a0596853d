#pragma once

// Analytical references and brute-force baselines.

#include "gbt/beamtrace.hpp"

#include <span>
#include <vector>

namespace gbt::oracle {

// e^{ikr} / (4 pi r), time convention e^{-i w t}. Throws std::domain_error for r <= 0.
Complex monopole_free(double r, double k);

// Monopole at (x_s, y_s, source_z) above a rigid plane z = 0.
struct MonopoleCase {
  double source_z = 5.0;
  double freq_hz = 50.0;
  double sound_speed = 343.2;
  double source_x = 0.0;
  double source_y = 0.0;

  double wavenumber() const;
};

// Direct plus image (x_s, y_s, -z_s) field, rigid reflection coefficient +1.
// Throws std::domain_error for observers below the plane.
Complex image_source_field(const MonopoleCase& mc, const Vec3& observer);

// Positions x on the line (y = source_y, z = line_z) where the direct and
// image paths differ by an odd number of half wavelengths.
std::vector<double> interference_nulls(const MonopoleCase& mc, double line_z, double x_min,
                                       double x_max);

// Unoptimised GBS reference: no cutoff, exhaustive nearest-point search,
// sqrt(det Q) by stepwise continuation from s = 0, ascending-index sum.
Complex brute_force_sum(const Vec3& observer, std::span<const BeamPath> paths, double omega,
                        double phi_scale);

}  // namespace gbt::oracle
