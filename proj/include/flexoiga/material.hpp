#pragma once

#include <Eigen/Dense>

#include <string>

namespace flexoiga {

using Matrix3d = Eigen::Matrix3d;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix23d = Eigen::Matrix<double, 2, 3>;
using Matrix26d = Eigen::Matrix<double, 2, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Constitutive constants in SI units. Strain is (e11, e22, gamma12); the
/// strain gradient is (e11_1, e22_1, gamma12_1, e11_2, e22_2, gamma12_2).
struct MaterialSet {
  double E = 100e9;
  double nu = 0.37;
  double kappa11 = 12.48e-9;
  double kappa22 = 12.48e-9;
  double e11 = 4.4;
  double e15 = 0.0;
  double e21 = -4.4;
  double e22 = 0.0;
  double mu11 = 1e-6;
  double mu12 = 1e-6;
  double mu44 = 0.0;
  double length_scale = 1e-10;

  /// Throws singular-material or invalid-argument on out-of-range constants.
  void validate() const;

  Matrix3d C() const;
  Matrix6d h() const;
  Eigen::Matrix2d kappa() const;
  Matrix23d e() const;
  Matrix26d mu() const;
};

/// Named parameter sets: "coupled", "flexo_only", "piezo_only", "one_d".
MaterialSet material_preset(const std::string& name);

/// Plane-strain elasticity matrix.
Matrix3d build_C(double E, double nu);
/// Gradient elasticity: two diagonal copies of the {C11, C12, C44} block times L^2.
Matrix6d build_h(const Matrix3d& C, double L);
Eigen::Matrix2d build_kappa(double k11, double k22);
/// Rows (D1, D2), columns (e11, e22, gamma12); e11 occupies (1,1).
Matrix23d build_e(double e15, double e21, double e22, double e11 = 0.0);
Matrix26d build_mu(double mu11, double mu12, double mu44);

struct PointState {
  Eigen::Vector3d eps = Eigen::Vector3d::Zero();
  Vector6d grad_eps = Vector6d::Zero();
  Eigen::Vector2d E = Eigen::Vector2d::Zero();
};

struct PointFlux {
  Eigen::Vector3d sigma_hat = Eigen::Vector3d::Zero();
  Vector6d sigma_tilde = Vector6d::Zero();
  Eigen::Vector2d D_hat = Eigen::Vector2d::Zero();
};

/// Precomputed matrices for repeated evaluation.
struct MaterialMatrices {
  Matrix3d C;
  Matrix6d h;
  Eigen::Matrix2d kappa;
  Matrix23d e;
  Matrix26d mu;

  explicit MaterialMatrices(const MaterialSet& m);
};

PointFlux constitutive(const PointState& s, const MaterialMatrices& m);
PointFlux constitutive(const PointState& s, const MaterialSet& m);

/// Electric enthalpy density.
double enthalpy(const PointState& s, const MaterialMatrices& m);

}  // namespace flexoiga
