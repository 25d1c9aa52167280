#pragma once

#include "flexoiga/spline.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace flexoiga {

using Vec2 = Eigen::Vector2d;

/// Position, Jacobian d(x,y)/d(xi,eta) and second parametric derivatives of the map.
struct MappingDerivs {
  Vec2 x = Vec2::Zero();
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  double detJ = 0.0;
  /// H_geo[k] = d^2 x_k / d(xi,eta)^2 as a symmetric 2x2 matrix.
  std::array<Eigen::Matrix2d, 2> H_geo{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
};

/// Basis functions with physical derivatives at one point.
struct PhysicalBasis {
  std::vector<int> indices;
  Eigen::VectorXd R;
  /// n x 2: (R_x, R_y)
  Eigen::MatrixXd dR;
  /// n x 3: (R_xx, R_xy, R_yy)
  Eigen::MatrixXd d2R;
  MappingDerivs map;

  int size() const { return static_cast<int>(R.size()); }
};

/// Parametric edge numbering: 0 eta=0, 1 xi=1, 2 eta=1, 3 xi=0. The edge
/// parameter s runs along increasing xi or eta.
struct EdgePoint {
  double xi;
  double eta;
};

EdgePoint edge_parameter(int edge, double s);

/// Single tensor-product NURBS patch.
class NurbsPatch {
 public:
  NurbsPatch() = default;
  NurbsPatch(PatchBasisSpec spec, std::vector<Vec2> control_points, std::vector<double> weights);

  /// Bilinear quad with corners at (xi,eta) = (0,0), (1,0), (1,1), (0,1), raised
  /// to the given degree with n_xi x n_eta uniform elements. Control points sit
  /// at the Greville abscissae so the parameterization stays bilinear.
  static NurbsPatch bilinear(const std::array<Vec2, 4>& corners, int degree, int n_xi, int n_eta);

  const PatchBasisSpec& spec() const { return spec_; }
  const std::vector<Vec2>& control_points() const { return cps_; }
  const std::vector<double>& weights() const { return weights_; }
  int num_control_points() const { return static_cast<int>(cps_.size()); }
  int control_index(int i, int j) const { return i + spec_.num_xi() * j; }

  Vec2 map_point(double xi, double eta) const;
  MappingDerivs mapping_derivatives(double xi, double eta) const;

  /// Push parametric derivatives to physical space. Throws degenerate-geometry
  /// when detJ <= 0.
  PhysicalBasis physical_basis(const NurbsBasis2D& param, int n_derivs) const;
  PhysicalBasis physical_basis(double xi, double eta, int n_derivs = 2) const;

  /// Control point indices along an edge in order of increasing edge parameter.
  std::vector<int> edge_control_points(int edge) const;
  const KnotVector& edge_knots(int edge) const { return edge % 2 == 0 ? spec_.xi : spec_.eta; }

  /// Unit outward normal and tangent dx/ds at edge parameter s.
  Vec2 edge_tangent(int edge, double s) const;
  Vec2 outward_normal(int edge, double s) const;

  /// Area via Gauss quadrature of detJ.
  double area() const;

  /// Corner positions in the same order as bilinear().
  std::array<Vec2, 4> corners() const;

 private:
  PatchBasisSpec spec_;
  std::vector<Vec2> cps_;
  std::vector<double> weights_;
};

}  // namespace flexoiga
