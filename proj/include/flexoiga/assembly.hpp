#pragma once

#include "flexoiga/material.hpp"
#include "flexoiga/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <vector>

namespace flexoiga {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Strain-displacement (2n x 3), strain-gradient (2n x 6) and field-potential
/// (n x 2) matrices at one quadrature point. Row 2a+c belongs to u_c of local
/// function a.
struct ElementMatrices {
  Eigen::MatrixXd B_u;
  Eigen::MatrixXd H_u;
  Eigen::MatrixXd B_phi;
};

ElementMatrices element_matrices(const PhysicalBasis& basis);

/// Calls visit(element, basis, weight) at every volume quadrature point of a
/// patch, (p+1) x (q+1) Gauss points per element unless n_gauss > 0. The weight
/// includes detJ.
void for_each_quadrature_point(const NurbsPatch& patch, int n_derivs,
                               const std::function<void(int, const PhysicalBasis&, double)>& visit,
                               int n_gauss = 0);

struct ElementBlock {
  /// Patch-local control point indices.
  std::vector<int> local;
  Eigen::MatrixXd K_uu;
  Eigen::MatrixXd K_phiu;
  Eigen::MatrixXd K_phiphi;
};

/// Volume stiffness of element (ex, ey) of a patch.
ElementBlock element_block(const NurbsPatch& patch, int ex, int ey, const MaterialMatrices& mat);

struct JumpAverage {
  double jump;
  double average;
};

/// Normal-derivative jump grad_L.n_L + grad_R.n_R and the average of two flux values.
JumpAverage jump_average(const Vec2& grad_L, const Vec2& grad_R, const Vec2& n_L, const Vec2& n_R, double flux_L,
                         double flux_R);

/// Penalty parameter alpha E L^2 / h.
double stabilization_tau(double alpha, double E, double L, double h);

/// Local interface contribution on the DOF list
/// [u of left functions, u of right functions, phi left, phi right].
struct InterfaceBlock {
  std::vector<int> dofs;
  Eigen::MatrixXd K;
  Eigen::MatrixXd K_penalty;
};

InterfaceBlock interface_block(const MultiPatchMesh& mesh, const InterfaceEdge& edge, const MaterialMatrices& mat,
                               double tau);

/// Rows of the interface operators at one edge point: normal-derivative jump
/// (2 x dofs) and averaged double traction (2 x dofs), plus the (eps11) jump
/// operator used for diagnostics.
struct InterfacePointOperators {
  Eigen::MatrixXd jump;
  Eigen::MatrixXd average;
  double line_weight = 0.0;
  Vec2 x = Vec2::Zero();
  Vec2 n_left = Vec2::Zero();
  Vec2 n_right = Vec2::Zero();
  PhysicalBasis left;
  PhysicalBasis right;
};

/// Evaluates fn at every interface quadrature point, (max(p,q)+2) per span.
void for_each_interface_point(const MultiPatchMesh& mesh, const InterfaceEdge& edge, const MaterialMatrices& mat,
                              const std::function<void(const InterfacePointOperators&)>& fn);

/// Dirichlet values and equipotential ties by global DOF.
class DofConstraints {
 public:
  void set_value(int dof, double value);
  void tie(std::vector<int> dofs);

  const std::vector<std::pair<int, double>>& values() const { return values_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }

  /// Resolved map for n DOFs: reduced index (or -1 when fixed) and value for
  /// fixed ones. Throws over-constrained on conflicts.
  struct Resolved {
    std::vector<int> reduced;
    std::vector<double> fixed_value;
    std::vector<bool> is_fixed;
    int num_reduced = 0;
  };
  Resolved resolve(int n) const;

 private:
  std::vector<std::pair<int, double>> values_;
  std::vector<std::vector<int>> groups_;
};

struct EdgeLoad {
  EdgeRef edge;
  Vec2 traction = Vec2::Zero();
  Vec2 double_traction = Vec2::Zero();
  double surface_charge = 0.0;
};

struct PointLoad {
  int node;
  int component;
  double value;
};

struct BoundarySpec {
  DofConstraints constraints;
  std::vector<EdgeLoad> edge_loads;
  std::vector<PointLoad> point_loads;
  std::function<Vec2(const Vec2&)> body_force;
  std::function<double(const Vec2&)> charge_density;

  void fix_u(const MultiPatchMesh& mesh, const std::vector<int>& nodes, int comp, double value);
  void fix_phi(const MultiPatchMesh& mesh, const std::vector<int>& nodes, double value);
  void equipotential(const MultiPatchMesh& mesh, const std::vector<int>& nodes);
  void traction(const std::vector<EdgeRef>& edges, const Vec2& t);
};

/// Unscaled blocks and loads with the scaling parameter and constraints.
struct CoupledSystem {
  int num_nodes = 0;
  SparseMatrix K_uu;
  SparseMatrix K_uphi;
  SparseMatrix K_phiu;
  SparseMatrix K_phiphi;
  SparseMatrix K_I;
  SparseMatrix K_I_penalty;
  Eigen::VectorXd F;
  double beta = 1e10;
  DofConstraints constraints;

  int num_dofs() const { return 3 * num_nodes; }
  /// [[K_uu, K_uphi], [K_phiu, -K_phiphi]] + K_I without scaling.
  SparseMatrix full_matrix() const;
  /// S (full) S with S = diag(1, beta).
  SparseMatrix scaled_matrix() const;
  Eigen::VectorXd scaled_rhs() const;
};

/// Load vector [F_u; F_phi] from body, edge and point data.
Eigen::VectorXd load_vector(const MultiPatchMesh& mesh, const BoundarySpec& bc);

struct AssemblyOptions {
  std::optional<double> tau;
  double alpha = 0.0;
  double beta = 1e10;
};

CoupledSystem assemble(const MultiPatchMesh& mesh, const MaterialSet& mat, const BoundarySpec& bc,
                       const AssemblyOptions& opts);

}  // namespace flexoiga
