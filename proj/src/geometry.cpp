#include "ddm/geometry.hpp"

#include <algorithm>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "ddm/errors.hpp"

namespace ddm {

namespace {

constexpr double kPi = 3.141592653589793;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const {
    gsl_integration_workspace_free(w);
  }
};

// GSL aborts on errors by default; status codes are checked instead.
void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

template <class F>
QuadratureResult qag(const F& f, double a, double b, double rel_tol,
                     double abs_tol = 0.0) {
  constexpr std::size_t kLimit = 2000;
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(kLimit));
  gsl_function gf;
  gf.function = [](double x, void* p) { return (*static_cast<const F*>(p))(x); };
  gf.params = const_cast<F*>(&f);
  QuadratureResult r;
  const int status = gsl_integration_qag(&gf, a, b, abs_tol, rel_tol, kLimit,
                                         GSL_INTEG_GAUSS61, ws.get(), &r.value,
                                         &r.error);
  if (status != GSL_SUCCESS) {
    throw QuadratureError(std::string("adaptive quadrature failed: ") +
                              gsl_strerror(status),
                          r.value != 0.0 ? r.error / std::abs(r.value) : 1.0);
  }
  return r;
}

}  // namespace

void CloudGeometry::validate() const {
  if (!(ell_ax > 0.0) || !(ell_rad > 0.0)) {
    throw DomainError("cloud sizes must be > 0");
  }
  const double norm2 = drive_axis[0] * drive_axis[0] +
                       drive_axis[1] * drive_axis[1] +
                       drive_axis[2] * drive_axis[2];
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
    throw DomainError("drive_axis must be a unit vector");
  }
}

double dipole_pattern(double theta, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(theta);
  return 0.5 * (1.0 + c * c * s * s);
}

double structure_factor(const Vec3& q, const CloudGeometry& geom) {
  const double ax = q[0] * geom.ell_ax;
  const double rad2 = (q[1] * q[1] + q[2] * q[2]) * geom.ell_rad * geom.ell_rad;
  return std::exp(-ax * ax - rad2);
}

QuadratureResult coherent_power(const CloudGeometry& geom, double rel_tol) {
  geom.validate();
  if (std::abs(geom.drive_axis[0] - 1.0) > 1e-12) {
    throw DomainError("only a drive along the cloud axis (x) is supported");
  }
  const double kax2 = std::pow(kWavenumber * geom.ell_ax, 2);
  const double krad2 = std::pow(kWavenumber * geom.ell_rad, 2);

  // u = 1 - cos(theta), du = sin(theta) dtheta, sin^2(theta) = u (2 - u).
  const auto integrand = [=](double u) {
    const double sin2 = u * (2.0 - u);
    return kPi * (1.0 + 0.5 * sin2) * std::exp(-krad2 * sin2) *
           std::exp(-kax2 * u * u);
  };

  // The forward lobe lives in u < few/(k*ell_ax); integrate it on its own.
  const double u_split = std::min(2.0, 10.0 / std::sqrt(kax2));
  disable_gsl_abort();
  QuadratureResult r = qag(integrand, 0.0, u_split, rel_tol);
  if (u_split < 2.0) {
    const QuadratureResult tail = qag(integrand, u_split, 2.0, rel_tol,
                                        0.1 * rel_tol * r.value);
    r.value += tail.value;
    r.error += tail.error;
  }
  if (!(r.value > 0.0) || r.error > rel_tol * r.value) {
    throw QuadratureError("coherent power quadrature did not reach " +
                              std::to_string(rel_tol),
                          r.value > 0.0 ? r.error / r.value : 1.0);
  }
  return r;
}

double cooperativity_mu(const CloudGeometry& geom, double rel_tol) {
  return coherent_power(geom, rel_tol).value / kDipolePower;
}

double small_angle_mu(double ell_ax) {
  if (!(ell_ax > 0.0)) throw DomainError("ell_ax must be > 0");
  return 1.0 / (kWavenumber * ell_ax);
}

}  // namespace ddm
