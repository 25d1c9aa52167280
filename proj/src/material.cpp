#include "flexoiga/material.hpp"

#include "flexoiga/error.hpp"

namespace flexoiga {

void MaterialSet::validate() const {
  require(E > 0.0, ErrorKind::InvalidArgument, "Young's modulus must be positive");
  require(nu > -1.0 && nu < 0.5, ErrorKind::SingularMaterial, "Poisson ratio must lie in (-1, 0.5)");
  require(kappa11 >= 0.0 && kappa22 > 0.0, ErrorKind::SingularMaterial,
          "permittivities must be positive (kappa11 may be zero)");
  require(length_scale >= 0.0, ErrorKind::InvalidArgument, "length scale must be non-negative");
}

Matrix3d build_C(double E, double nu) {
  require(nu < 0.5 && nu > -1.0, ErrorKind::SingularMaterial, "plane-strain C is singular for this Poisson ratio");
  const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
  Matrix3d C;
  C << f * (1.0 - nu), f * nu, 0.0,
       f * nu, f * (1.0 - nu), 0.0,
       0.0, 0.0, f * (1.0 - 2.0 * nu) / 2.0;
  return C;
}

Matrix6d build_h(const Matrix3d& C, double L) {
  Matrix6d h = Matrix6d::Zero();
  h.block<3, 3>(0, 0) = C;
  h.block<3, 3>(3, 3) = C;
  return L * L * h;
}

Eigen::Matrix2d build_kappa(double k11, double k22) {
  Eigen::Matrix2d k;
  k << k11, 0.0, 0.0, k22;
  return k;
}

Matrix23d build_e(double e15, double e21, double e22, double e11) {
  Matrix23d e;
  e << e11, 0.0, e15,
       e21, e22, 0.0;
  return e;
}

Matrix26d build_mu(double mu11, double mu12, double mu44) {
  Matrix26d m;
  m << mu11, mu12, 0.0, 0.0, 0.0, mu44,
       0.0, 0.0, mu44, mu12, mu11, 0.0;
  return m;
}

Matrix3d MaterialSet::C() const { return build_C(E, nu); }
Matrix6d MaterialSet::h() const { return build_h(C(), length_scale); }
Eigen::Matrix2d MaterialSet::kappa() const { return build_kappa(kappa11, kappa22); }
Matrix23d MaterialSet::e() const { return build_e(e15, e21, e22, e11); }
Matrix26d MaterialSet::mu() const { return build_mu(mu11, mu12, mu44); }

MaterialSet material_preset(const std::string& name) {
  MaterialSet m;
  if (name == "coupled") return m;
  if (name == "flexo_only") {
    m.e11 = m.e15 = m.e21 = m.e22 = 0.0;
    return m;
  }
  if (name == "piezo_only") {
    m.mu11 = m.mu12 = m.mu44 = 0.0;
    return m;
  }
  if (name == "one_d") {
    m.kappa11 = 0.0;
    m.mu11 = 0.0;
    m.e11 = 0.0;
    m.nu = 0.0;
    return m;
  }
  fail(ErrorKind::ConfigError, "unknown material preset '" + name + "'");
}

MaterialMatrices::MaterialMatrices(const MaterialSet& m)
    : C(m.C()), h(m.h()), kappa(m.kappa()), e(m.e()), mu(m.mu()) {}

PointFlux constitutive(const PointState& s, const MaterialMatrices& m) {
  PointFlux f;
  f.sigma_hat = m.C * s.eps - m.e.transpose() * s.E;
  f.sigma_tilde = m.h * s.grad_eps - m.mu.transpose() * s.E;
  f.D_hat = m.kappa * s.E + m.e * s.eps + m.mu * s.grad_eps;
  return f;
}

PointFlux constitutive(const PointState& s, const MaterialSet& m) { return constitutive(s, MaterialMatrices(m)); }

double enthalpy(const PointState& s, const MaterialMatrices& m) {
  return 0.5 * s.eps.dot(m.C * s.eps) + 0.5 * s.grad_eps.dot(m.h * s.grad_eps) - 0.5 * s.E.dot(m.kappa * s.E) -
         s.E.dot(m.e * s.eps) - s.E.dot(m.mu * s.grad_eps);
}

}  // namespace flexoiga
