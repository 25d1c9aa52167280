#include "flexoiga/solve.hpp"

#include "flexoiga/error.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace flexoiga {

SolutionField solve(const CoupledSystem& sys, double tol) {
  const int n = sys.num_dofs();
  const auto resolved = sys.constraints.resolve(n);
  const SparseMatrix A = sys.scaled_matrix();
  const Eigen::VectorXd f = sys.scaled_rhs();
  const int N = sys.num_nodes;

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (resolved.is_fixed[i]) fixed(i) = resolved.fixed_value[i] / (i >= 2 * N ? sys.beta : 1.0);
  }

  const int m = resolved.num_reduced;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) {
    if (resolved.reduced[i] >= 0) b(resolved.reduced[i]) += f(i);
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      const int ri = resolved.reduced[it.row()];
      if (ri < 0) continue;
      const int rj = resolved.reduced[it.col()];
      if (rj >= 0) {
        trip.emplace_back(ri, rj, it.value());
      } else {
        b(ri) -= it.value() * fixed(it.col());
      }
    }
  }
  SparseMatrix Ar(m, m);
  Ar.setFromTriplets(trip.begin(), trip.end());
  Ar.makeCompressed();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  double residual = 0.0;
  double relative = 0.0;
  if (m > 0) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(Ar);
    if (lu.info() != Eigen::Success) {
      fail(ErrorKind::SolverFailure, "sparse LU factorization failed (" + lu.lastErrorMessage() +
                                         "); the constrained system is singular, check boundary conditions");
    }
    x = lu.solve(b);
    const double bn = b.norm();
    Eigen::VectorXd r = Ar * x - b;
    for (int step = 0; step < 5 && r.norm() > 1e-3 * tol * bn; ++step) {
      x -= lu.solve(r);
      r = Ar * x - b;
    }
    // Normwise backward error: the plain ratio |r|/|b| bottoms out at
    // eps |A| |x| / |b|, which large penalties push far above tol.
    double anorm = 0.0;
    for (int k = 0; k < Ar.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(Ar, k); it; ++it) anorm = std::max(anorm, std::abs(it.value()));
    }
    const double scale = anorm * x.norm() + bn;
    residual = scale > 0.0 ? r.norm() / scale : 0.0;
    relative = bn > 0.0 ? r.norm() / bn : r.norm();
    if (!(residual < tol) || !x.allFinite()) {
      std::ostringstream msg;
      msg << "backward error " << residual << " exceeds " << tol << " (log|det| = " << lu.logAbsDeterminant()
          << ", " << m << " unknowns); the system is ill-conditioned or singular";
      fail(ErrorKind::SolverFailure, msg.str());
    }
    // A tiny backward error can still hide a singular system whose huge x
    // absorbs the residual; x = 0 would have done better than that.
    if (relative > 1.0) {
      std::ostringstream msg;
      msg << "residual " << relative << " times the load norm; the constrained system is singular, "
          << "check boundary conditions";
      fail(ErrorKind::SolverFailure, msg.str());
    }
  }

  SolutionField sol;
  sol.residual = residual;
  sol.relative_residual = relative;
  sol.num_free_dofs = m;
  Eigen::VectorXd full(n);
  for (int i = 0; i < n; ++i) full(i) = resolved.reduced[i] >= 0 ? x(resolved.reduced[i]) : fixed(i);
  sol.u = full.head(2 * N);
  sol.phi = sys.beta * full.tail(N);
  for (int i = 2 * N; i < n; ++i) {
    if (resolved.is_fixed[i]) sol.phi(i - 2 * N) = resolved.fixed_value[i];
  }
  return sol;
}

FieldSample sample_at(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialMatrices& mat, int patch,
                      const PhysicalBasis& pb) {
  FieldSample s;
  s.x = pb.map.x;
  const ElementMatrices em = element_matrices(pb);
  const int n = pb.size();
  Eigen::VectorXd ue(2 * n), pe(n);
  for (int a = 0; a < n; ++a) {
    const int g = mesh.node(patch, pb.indices[a]);
    ue(2 * a) = sol.u(2 * g);
    ue(2 * a + 1) = sol.u(2 * g + 1);
    pe(a) = sol.phi(g);
  }
  for (int a = 0; a < n; ++a) {
    s.u += pb.R(a) * Vec2(ue(2 * a), ue(2 * a + 1));
    s.phi += pb.R(a) * pe(a);
  }
  s.state.eps = em.B_u.transpose() * ue;
  if (pb.d2R.rows() == n) s.state.grad_eps = em.H_u.transpose() * ue;
  s.state.E = -em.B_phi.transpose() * pe;
  s.flux = constitutive(s.state, mat);
  return s;
}

FieldSample sample_at(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialMatrices& mat, int patch,
                      double xi, double eta) {
  return sample_at(sol, mesh, mat, patch, mesh.patch(patch).physical_basis(xi, eta, 2));
}

std::optional<PatchLocation> locate(const MultiPatchMesh& mesh, const Vec2& x) {
  const double tol = mesh.tolerance();
  for (int p = 0; p < mesh.num_patches(); ++p) {
    const NurbsPatch& patch = mesh.patch(p);
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (const auto& c : patch.control_points()) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    if ((x.array() < lo.array() - tol).any() || (x.array() > hi.array() + tol).any()) continue;
    Vec2 q(0.5, 0.5);
    for (int it = 0; it < 50; ++it) {
      const PhysicalBasis pb = patch.physical_basis(q.x(), q.y(), 1);
      const Vec2 r = x - pb.map.x;
      if (r.norm() <= 1e-3 * tol) break;
      q += pb.map.J.inverse() * r;
      q = q.cwiseMax(0.0).cwiseMin(1.0);
    }
    if ((patch.map_point(q.x(), q.y()) - x).norm() <= tol) return PatchLocation{p, q.x(), q.y()};
  }
  return std::nullopt;
}

std::vector<FieldSample> sample_fields(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat,
                                       const std::vector<Vec2>& points) {
  const MaterialMatrices mm(mat);
  std::vector<FieldSample> out;
  out.reserve(points.size());
  for (const Vec2& x : points) {
    const auto loc = locate(mesh, x);
    require(loc.has_value(), ErrorKind::OutOfDomain, "sample point lies outside the mesh");
    out.push_back(sample_at(sol, mesh, mm, loc->patch, loc->xi, loc->eta));
  }
  return out;
}

namespace {

Eigen::VectorXd local_values(const SolutionField& sol, const MultiPatchMesh& mesh, int patch,
                             const std::vector<int>& indices) {
  Eigen::VectorXd ue(2 * static_cast<Eigen::Index>(indices.size()));
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const int g = mesh.node(patch, indices[a]);
    ue(2 * a) = sol.u(2 * g);
    ue(2 * a + 1) = sol.u(2 * g + 1);
  }
  return ue;
}

double eps11(const SolutionField& sol, const MultiPatchMesh& mesh, int patch, const PhysicalBasis& pb) {
  const Eigen::VectorXd ue = local_values(sol, mesh, patch, pb.indices);
  double v = 0.0;
  for (int a = 0; a < pb.size(); ++a) v += pb.dR(a, 0) * ue(2 * a);
  return v;
}

}  // namespace

double interface_jump_metric(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat) {
  require(!mesh.interfaces().empty(), ErrorKind::NotApplicable, "jump metric needs at least one interface");
  const MaterialMatrices mm(mat);
  double max_eps = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for_each_quadrature_point(mesh.patch(p), 1, [&](int, const PhysicalBasis& pb, double) {
      max_eps = std::max(max_eps, std::abs(eps11(sol, mesh, p, pb)));
    });
  }
  double max_jump = 0.0;
  for (const InterfaceEdge& edge : mesh.interfaces()) {
    for_each_interface_point(mesh, edge, mm, [&](const InterfacePointOperators& op) {
      const double l = eps11(sol, mesh, edge.left.patch, op.left);
      const double r = eps11(sol, mesh, edge.right.patch, op.right);
      max_eps = std::max({max_eps, std::abs(l), std::abs(r)});
      max_jump = std::max(max_jump, std::abs(l - r));
    });
  }
  return max_eps > 0.0 ? max_jump / max_eps : 0.0;
}

EnergyReport energies(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat) {
  const MaterialMatrices mm(mat);
  EnergyReport rep;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    for_each_quadrature_point(mesh.patch(p), 2, [&](int, const PhysicalBasis& pb, double w) {
      const FieldSample s = sample_at(sol, mesh, mm, p, pb);
      const auto& st = s.state;
      rep.W_mech += 0.5 * w * (st.eps.dot(mm.C * st.eps) + st.grad_eps.dot(mm.h * st.grad_eps));
      rep.W_elec += 0.5 * w * st.E.dot(mm.kappa * st.E);
      rep.W_work += 0.5 * w * (st.eps.dot(s.flux.sigma_hat) + st.grad_eps.dot(s.flux.sigma_tilde));
    });
  }
  require(rep.W_mech > 0.0, ErrorKind::NotApplicable, "coupling factor undefined for zero mechanical energy");
  rep.K_EM = std::sqrt(rep.W_elec / rep.W_mech);
  return rep;
}

double max_displacement(const SolutionField& sol, const MultiPatchMesh& mesh, int n) {
  double best = 0.0;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    const NurbsPatch& patch = mesh.patch(p);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double xi = static_cast<double>(i) / (n - 1), eta = static_cast<double>(j) / (n - 1);
        const NurbsBasis2D b = nurbs_basis_2d(patch.spec(), patch.weights(), xi, eta, 0);
        Vec2 u = Vec2::Zero();
        for (std::size_t a = 0; a < b.size(); ++a) u += b.R[a] * sol.node_u(mesh.node(p, b.indices[a]));
        best = std::max(best, u.norm());
      }
    }
  }
  return best;
}

KemMode parse_kem_mode(const std::string& name) {
  if (name == "flexo_only") return KemMode::FlexoOnly;
  if (name == "piezo_only") return KemMode::PiezoOnly;
  if (name == "combined") return KemMode::Combined;
  fail(ErrorKind::ConfigError, "unknown coupling mode '" + name + "' (flexo_only, piezo_only, combined)");
}

std::string to_string(KemMode mode) {
  switch (mode) {
    case KemMode::FlexoOnly: return "flexo_only";
    case KemMode::PiezoOnly: return "piezo_only";
    case KemMode::Combined: return "combined";
  }
  return "combined";
}

AnalyticKem analytical_kem(const MaterialSet& mat, double thickness, KemMode mode) {
  require(thickness > 0.0, ErrorKind::InvalidArgument, "beam thickness must be positive");
  const double kappa = mat.kappa22;
  const double chi = kappa + 1.0;
  const double pre = chi / (1.0 + chi) * std::sqrt(kappa / mat.E);
  const double e = mode == KemMode::FlexoOnly ? 0.0 : mat.e21;
  const double mu = mode == KemMode::PiezoOnly ? 0.0 : mat.mu12 / thickness;
  AnalyticKem out;
  out.K_EM = pre * std::sqrt(e * e + 12.0 * mu * mu);
  const double ref = pre * std::abs(mat.e21);
  out.normalized = ref > 0.0 ? out.K_EM / ref : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double normalized_thickness(const MaterialSet& mat, double thickness) {
  require(mat.mu12 != 0.0, ErrorKind::InvalidArgument, "normalized thickness needs a nonzero mu12");
  return -mat.e21 * thickness / mat.mu12;
}

}  // namespace flexoiga
