#pragma once

#include <array>

namespace ddm {

using Vec3 = std::array<double, 3>;

// Lengths are in units of the wavelength, so k = 2*pi.
inline constexpr double kWavenumber = 6.283185307179586;

/// Gaussian cloud with r.m.s. sizes along the main axis x and radially.
struct CloudGeometry {
  double ell_ax = 1.0;
  double ell_rad = 1.0;
  Vec3 drive_axis{1.0, 0.0, 0.0};

  /// Throws DomainError on non-positive sizes or a non-unit drive axis.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

/// Far-field pattern of a circularly polarized dipole,
/// (1 + cos^2(phi) sin^2(theta))/2, with theta measured from the drive axis.
double dipole_pattern(double theta, double phi);

/// Total single-dipole power, the integral of dipole_pattern over 4*pi.
inline constexpr double kDipolePower = 8.0 * 3.141592653589793 / 3.0;

/// |FT of the Gaussian density|^2 at wavevector difference q (radians per
/// wavelength).
double structure_factor(const Vec3& q, const CloudGeometry& geom);

/// Coherent power scattered into the forward diffraction mode for a drive
/// along the cloud axis: the azimuthally integrated dipole pattern times the
/// structure factor, integrated over the polar angle. Integrated in
/// u = 1 - cos(theta) by adaptive Gauss-Kronrod so the forward lobe of width
/// ~1/(k*ell_ax) is resolved. Throws QuadratureError when the estimated
/// relative error exceeds `rel_tol`.
QuadratureResult coherent_power(const CloudGeometry& geom,
                                double rel_tol = 1e-10);

/// mu = coherent_power / kDipolePower, so N*mu is the effective atom number.
double cooperativity_mu(const CloudGeometry& geom, double rel_tol = 1e-10);

/// Small-angle estimate lambda/(2*pi*ell_ax).
double small_angle_mu(double ell_ax);

}  // namespace ddm
