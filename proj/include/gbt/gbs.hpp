#pragma once

// Gaussian beam summation: evaluates every beam's Gaussian field at an
// observer and accumulates the weighted contributions.

#include "gbt/beamtrace.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace gbt {

// Contributions whose Gaussian exponent has real part below this are skipped.
inline constexpr double kCutoffExponent = -36.0;
inline constexpr double kReferencePressure = 2e-5;
inline constexpr double kCalibrationRadius = 10.0;

struct PathPoint {
  std::size_t segment = 0;
  double s_star = 0.0;
  Eigen::Vector2d q = Eigen::Vector2d::Zero();  // offset in the segment's (e1, e2) frame
  double distance = 0.0;
  // True when the observer's offset is orthogonal to the ray at s_star, i.e.
  // the observer has ray-centred coordinates on this beam. False when the
  // nearest point is a clamped endpoint with an along-ray offset.
  bool abeam = false;
};

// Euclidean nearest point of the polyline; ties resolve toward smaller s.
// Precondition: path has at least one segment.
PathPoint nearest_on_path(const Vec3& observer, const BeamPath& path);

// phi sqrt(c / det Q(s*)) r_acc exp[i w T(s*) + (i w / 2) q^T P Q^-1 q].
// Throws DegenerateBeamError if det Q(s*) = 0 or Im(P Q^-1) is not positive definite.
Complex beam_pressure(const BeamPath& path, const PathPoint& point, double omega);

// Real part of the Gaussian exponent, -(w/2) Im(q^T P Q^-1 q).
double gaussian_exponent(const BeamPath& path, const PathPoint& point, double omega);

// Im(P Q(s)^-1) positive definite and det Q(s) != 0.
bool beam_regular(const BeamPath& path, double s);

struct GbsParams {
  double phi_scale = 1.0;  // Phi = phi_scale * k
  bool cutoff = true;
};

// Adds beam `path`'s weighted contribution at `observer` for every angular
// frequency into `acc[f]`, in the order given. Returns the number of
// contributions evaluated (cutoff skips and non-abeam beams excluded).
std::size_t accumulate_beam(const Vec3& observer, const BeamPath& path,
                            std::span<const double> omegas, const GbsParams& params,
                            std::span<Complex> acc);

// Writes the weighted contribution of `path` per frequency into `out`
// (zero where skipped). Adding `out` into an accumulator gives the same bits
// as accumulate_beam, since a skipped term is an exact zero.
std::size_t evaluate_beam(const Vec3& observer, const BeamPath& path,
                          std::span<const double> omegas, const GbsParams& params,
                          std::span<Complex> out);

// p(R, w) = sum over beams (ascending index) of Phi * beam_pressure * weight.
Complex sum_at_observer(const Vec3& observer, std::span<const BeamPath> paths, double omega,
                        const GbsParams& params);

// 20 log10(|p| / 20 uPa); -infinity for a null point.
double spl(Complex pressure);

// Unit vectors towards the 26 neighbours of a cube cell (faces, edges, corners).
std::vector<Vec3> probe_directions();

struct Calibration {
  double scale = 1.0;                   // combined phi_scale
  std::vector<double> per_frequency;    // scale found at each frequency
  double direction_spread_db = 0.0;     // worst max-min over probe directions
  double frequency_spread_db = 0.0;     // max-min of per_frequency in dB
};

// Scale such that the free-field sum at kCalibrationRadius around `source`
// has magnitude 1 / (4 pi r). `paths` must come from a free-field trace.
// Throws InputError for non-free-field paths and when the field spread over
// probe directions exceeds 1 dB.
double calibrate_phi(std::span<const BeamPath> paths, const Vec3& source, double omega,
                     double* direction_spread_db = nullptr);

// calibrate_phi at each frequency; the combined scale is the geometric mean.
// Throws InputError when the per-frequency scales differ by more than
// `max_frequency_spread_db`.
Calibration calibrate(std::span<const BeamPath> paths, const Vec3& source,
                      std::span<const double> frequencies_hz,
                      double max_frequency_spread_db = 0.5);

struct FieldResult {
  std::vector<Vec3> observers;
  std::vector<double> frequencies_hz;
  std::vector<Complex> pressure;  // observer-major, frequency-minor
  std::vector<double> spl_db;
  double calibration = 1.0;

  std::size_t index(std::size_t observer, std::size_t freq) const {
    return observer * frequencies_hz.size() + freq;
  }
};

}  // namespace gbt
