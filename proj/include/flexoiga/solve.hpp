#pragma once

#include "flexoiga/assembly.hpp"

#include <optional>
#include <vector>

namespace flexoiga {

/// Displacements and potential at the global nodes, in physical units.
struct SolutionField {
  Eigen::VectorXd u;
  Eigen::VectorXd phi;
  /// Backward error |Ax-b| / (max|A_ij| |x| + |b|) of the reduced scaled system.
  double residual = 0.0;
  /// |Ax-b| / |b| of the same system.
  double relative_residual = 0.0;
  int num_free_dofs = 0;

  Vec2 node_u(int node) const { return {u(2 * node), u(2 * node + 1)}; }
};

/// Eliminates constraints, applies the scaling and factorizes with a direct
/// sparse LU with iterative refinement. Throws solver-failure when the backward
/// error exceeds tol.
SolutionField solve(const CoupledSystem& sys, double tol = 1e-9);

/// Field values and fluxes at one parametric point of one patch.
struct FieldSample {
  Vec2 x = Vec2::Zero();
  Vec2 u = Vec2::Zero();
  double phi = 0.0;
  PointState state;
  PointFlux flux;
};

FieldSample sample_at(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialMatrices& mat, int patch,
                      double xi, double eta);
FieldSample sample_at(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialMatrices& mat, int patch,
                      const PhysicalBasis& basis);

struct PatchLocation {
  int patch = -1;
  double xi = 0.0;
  double eta = 0.0;
};

/// Inverse map by Newton iteration; nullopt outside every patch.
std::optional<PatchLocation> locate(const MultiPatchMesh& mesh, const Vec2& x);

/// Samples at physical points. Throws out-of-domain for points outside the mesh.
std::vector<FieldSample> sample_fields(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat,
                                       const std::vector<Vec2>& points);

/// max |eps11_L - eps11_R| over interface quadrature points divided by max |eps11|
/// over element and interface quadrature points. Throws not-applicable without interfaces.
double interface_jump_metric(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat);

struct EnergyReport {
  /// 1/2 int (eps.C.eps + grad_eps.h.grad_eps)
  double W_mech = 0.0;
  /// 1/2 int E.kappa.E
  double W_elec = 0.0;
  /// 1/2 int (eps.sigma_hat + grad_eps.sigma_tilde)
  double W_work = 0.0;
  /// sqrt(W_elec / W_mech)
  double K_EM = 0.0;
};

EnergyReport energies(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat);

/// Largest displacement magnitude over a uniform parametric grid of n x n points per patch.
double max_displacement(const SolutionField& sol, const MultiPatchMesh& mesh, int n = 21);

enum class KemMode { FlexoOnly, PiezoOnly, Combined };

KemMode parse_kem_mode(const std::string& name);
std::string to_string(KemMode mode);

struct AnalyticKem {
  double K_EM = 0.0;
  /// Relative to the purely piezoelectric beam of the same material.
  double normalized = 0.0;
};

/// Closed-form cantilever coupling factor from kappa22, e21, mu12 and E.
AnalyticKem analytical_kem(const MaterialSet& mat, double thickness, KemMode mode);

/// -e21 t / mu12
double normalized_thickness(const MaterialSet& mat, double thickness);

}  // namespace flexoiga
