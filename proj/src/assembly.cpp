#include "flexoiga/assembly.hpp"

#include "flexoiga/error.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace flexoiga {

using Triplets = std::vector<Eigen::Triplet<double>>;

ElementMatrices element_matrices(const PhysicalBasis& b) {
  const int n = b.size();
  ElementMatrices m;
  m.B_u = Eigen::MatrixXd::Zero(2 * n, 3);
  m.H_u = Eigen::MatrixXd::Zero(2 * n, 6);
  m.B_phi = b.dR;
  for (int a = 0; a < n; ++a) {
    const double Rx = b.dR(a, 0), Ry = b.dR(a, 1);
    m.B_u.row(2 * a) << Rx, 0.0, Ry;
    m.B_u.row(2 * a + 1) << 0.0, Ry, Rx;
    if (b.d2R.rows() == n) {
      const double Rxx = b.d2R(a, 0), Rxy = b.d2R(a, 1), Ryy = b.d2R(a, 2);
      m.H_u.row(2 * a) << Rxx, 0.0, Rxy, Rxy, 0.0, Ryy;
      m.H_u.row(2 * a + 1) << 0.0, Rxy, Rxx, 0.0, Ryy, Rxy;
    }
  }
  return m;
}

void for_each_quadrature_point(const NurbsPatch& patch, int n_derivs,
                               const std::function<void(int, const PhysicalBasis&, double)>& visit, int n_gauss) {
  const PatchBasisSpec& spec = patch.spec();
  const int param_derivs = std::max(n_derivs, 1);
  const QuadratureRule rx = gauss_rule(n_gauss > 0 ? n_gauss : spec.xi.degree() + 1);
  const QuadratureRule ry = gauss_rule(n_gauss > 0 ? n_gauss : spec.eta.degree() + 1);
  const UnivariateTable tx = tabulate_basis(spec.xi, rx, param_derivs);
  const UnivariateTable ty = tabulate_basis(spec.eta, ry, param_derivs);
  const int nex = static_cast<int>(tx.element_lengths.size());
  const int ney = static_cast<int>(ty.element_lengths.size());
  for (int ey = 0; ey < ney; ++ey) {
    for (int ex = 0; ex < nex; ++ex) {
      const double jac = 0.25 * tx.element_lengths[ex] * ty.element_lengths[ey];
      for (std::size_t gy = 0; gy < ry.size(); ++gy) {
        for (std::size_t gx = 0; gx < rx.size(); ++gx) {
          const NurbsBasis2D param = combine_nurbs(spec, patch.weights(), tx.at(ex, static_cast<int>(gx)),
                                                   ty.at(ey, static_cast<int>(gy)), param_derivs);
          const PhysicalBasis pb = patch.physical_basis(param, n_derivs);
          visit(ex + nex * ey, pb, rx.weights[gx] * ry.weights[gy] * jac * pb.map.detJ);
        }
      }
    }
  }
}

namespace {

struct LocalBlocks {
  Eigen::MatrixXd K_uu, K_phiu, K_phiphi;
};

void accumulate(LocalBlocks& blk, const PhysicalBasis& pb, double w, const MaterialMatrices& mat) {
  const ElementMatrices em = element_matrices(pb);
  const int n = pb.size();
  if (blk.K_uu.rows() == 0) {
    blk.K_uu = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    blk.K_phiu = Eigen::MatrixXd::Zero(n, 2 * n);
    blk.K_phiphi = Eigen::MatrixXd::Zero(n, n);
  }
  blk.K_uu.noalias() += w * (em.B_u * mat.C * em.B_u.transpose() + em.H_u * mat.h * em.H_u.transpose());
  blk.K_phiu.noalias() += w * (em.B_phi * mat.e * em.B_u.transpose() + em.B_phi * mat.mu * em.H_u.transpose());
  blk.K_phiphi.noalias() += w * (em.B_phi * mat.kappa * em.B_phi.transpose());
}

}  // namespace

ElementBlock element_block(const NurbsPatch& patch, int ex, int ey, const MaterialMatrices& mat) {
  const PatchBasisSpec& spec = patch.spec();
  const int nex = spec.xi.num_elements(), ney = spec.eta.num_elements();
  require(ex >= 0 && ex < nex && ey >= 0 && ey < ney, ErrorKind::OutOfDomain, "element index out of range");
  const QuadratureRule rx = gauss_rule(spec.xi.degree() + 1);
  const QuadratureRule ry = gauss_rule(spec.eta.degree() + 1);
  const auto bx = spec.xi.breakpoints();
  const auto by = spec.eta.breakpoints();
  const double lx = bx[ex + 1] - bx[ex], ly = by[ey + 1] - by[ey];
  LocalBlocks blk;
  ElementBlock out;
  for (std::size_t gy = 0; gy < ry.size(); ++gy) {
    for (std::size_t gx = 0; gx < rx.size(); ++gx) {
      const double xi = bx[ex] + 0.5 * (rx.points[gx] + 1.0) * lx;
      const double eta = by[ey] + 0.5 * (ry.points[gy] + 1.0) * ly;
      const PhysicalBasis pb = patch.physical_basis(xi, eta, 2);
      if (out.local.empty()) out.local = pb.indices;
      accumulate(blk, pb, rx.weights[gx] * ry.weights[gy] * 0.25 * lx * ly * pb.map.detJ, mat);
    }
  }
  out.K_uu = std::move(blk.K_uu);
  out.K_phiu = std::move(blk.K_phiu);
  out.K_phiphi = std::move(blk.K_phiphi);
  return out;
}

JumpAverage jump_average(const Vec2& grad_L, const Vec2& grad_R, const Vec2& n_L, const Vec2& n_R, double flux_L,
                         double flux_R) {
  return {grad_L.dot(n_L) + grad_R.dot(n_R), 0.5 * (flux_L + flux_R)};
}

double stabilization_tau(double alpha, double E, double L, double h) {
  require(h > 0.0, ErrorKind::InvalidArgument, "element size must be positive");
  return alpha * E * L * L / h;
}

namespace {

/// 2x6 map from the double-stress vector to the double traction for normal n.
Eigen::Matrix<double, 2, 6> normal_projector(const Vec2& n) {
  const double a = n.x() * n.x(), b = n.x() * n.y(), c = n.y() * n.y();
  Eigen::Matrix<double, 2, 6> N;
  N << a, 0.0, b, b, 0.0, c,
       0.0, b, a, 0.0, c, b;
  return N;
}

}  // namespace

void for_each_interface_point(const MultiPatchMesh& mesh, const InterfaceEdge& edge, const MaterialMatrices& mat,
                              const std::function<void(const InterfacePointOperators&)>& fn) {
  const NurbsPatch& PL = mesh.patch(edge.left.patch);
  const NurbsPatch& PR = mesh.patch(edge.right.patch);
  const KnotVector& kv = PL.edge_knots(edge.left.edge);
  const int p = std::max(PL.spec().xi.degree(), PL.spec().eta.degree());
  const QuadratureRule rule = gauss_rule(p + 2);
  const auto bp = kv.breakpoints();
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double len = bp[e + 1] - bp[e];
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double s = bp[e] + 0.5 * (rule.points[g] + 1.0) * len;
      const auto [xl, el] = edge_parameter(edge.left.edge, s);
      const auto [xr, er] = edge_parameter(edge.right.edge, edge.right_parameter(s));
      InterfacePointOperators op;
      op.left = PL.physical_basis(xl, el, 2);
      op.right = PR.physical_basis(xr, er, 2);
      const Vec2 t = op.left.map.J.col(edge.left.edge % 2 == 0 ? 0 : 1);
      op.x = op.left.map.x;
      op.line_weight = rule.weights[g] * 0.5 * len * t.norm();
      op.n_left = PL.outward_normal(edge.left.edge, s);
      op.n_right = PR.outward_normal(edge.right.edge, edge.right_parameter(s));

      const int nl = op.left.size(), nr = op.right.size();
      const int nd = 3 * (nl + nr);
      op.jump = Eigen::MatrixXd::Zero(2, nd);
      for (int a = 0; a < nl; ++a) {
        const double dn = op.left.dR.row(a).dot(op.n_left);
        op.jump(0, 2 * a) = dn;
        op.jump(1, 2 * a + 1) = dn;
      }
      for (int b = 0; b < nr; ++b) {
        const double dn = op.right.dR.row(b).dot(op.n_right);
        op.jump(0, 2 * nl + 2 * b) = dn;
        op.jump(1, 2 * nl + 2 * b + 1) = dn;
      }
      // Double stress h H_u^T u + mu^T B_phi^T phi on each side.
      const ElementMatrices ml = element_matrices(op.left);
      const ElementMatrices mr = element_matrices(op.right);
      Eigen::MatrixXd stress = Eigen::MatrixXd::Zero(6, nd);
      stress.block(0, 0, 6, 2 * nl) = mat.h * ml.H_u.transpose();
      stress.block(0, 2 * nl, 6, 2 * nr) = mat.h * mr.H_u.transpose();
      stress.block(0, 2 * (nl + nr), 6, nl) = mat.mu.transpose() * ml.B_phi.transpose();
      stress.block(0, 2 * (nl + nr) + nl, 6, nr) = mat.mu.transpose() * mr.B_phi.transpose();
      op.average = 0.5 * normal_projector(op.n_left) * stress;
      fn(op);
    }
  }
}

InterfaceBlock interface_block(const MultiPatchMesh& mesh, const InterfaceEdge& edge, const MaterialMatrices& mat,
                               double tau) {
  require(tau >= 0.0, ErrorKind::InvalidArgument, "penalty parameter must be non-negative");
  InterfaceBlock out;
  std::map<int, int> position;
  const int N = mesh.num_nodes();
  for_each_interface_point(mesh, edge, mat, [&](const InterfacePointOperators& op) {
    std::vector<int> local;
    for (int a : op.left.indices) {
      const int g = mesh.node(edge.left.patch, a);
      local.insert(local.end(), {2 * g, 2 * g + 1});
    }
    for (int b : op.right.indices) {
      const int g = mesh.node(edge.right.patch, b);
      local.insert(local.end(), {2 * g, 2 * g + 1});
    }
    for (int a : op.left.indices) local.push_back(2 * N + mesh.node(edge.left.patch, a));
    for (int b : op.right.indices) local.push_back(2 * N + mesh.node(edge.right.patch, b));

    std::vector<int> slot(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) {
      auto [it, inserted] = position.try_emplace(local[i], static_cast<int>(out.dofs.size()));
      if (inserted) out.dofs.push_back(local[i]);
      slot[i] = it->second;
    }
    const auto nd = static_cast<Eigen::Index>(out.dofs.size());
    if (out.K.rows() < nd) {
      const Eigen::Index old = out.K.rows();
      out.K.conservativeResize(nd, nd);
      out.K_penalty.conservativeResize(nd, nd);
      for (Eigen::MatrixXd* m : {&out.K, &out.K_penalty}) {
        m->bottomRows(nd - old).setZero();
        m->rightCols(nd - old).setZero();
      }
    }
    const Eigen::MatrixXd GtA = op.jump.transpose() * op.average;
    const Eigen::MatrixXd GtG = op.jump.transpose() * op.jump;
    const Eigen::MatrixXd k = op.line_weight * (-GtA - GtA.transpose() + tau * GtG);
    for (std::size_t i = 0; i < local.size(); ++i) {
      for (std::size_t j = 0; j < local.size(); ++j) {
        out.K(slot[i], slot[j]) += k(i, j);
        out.K_penalty(slot[i], slot[j]) += op.line_weight * tau * GtG(i, j);
      }
    }
  });
  return out;
}

void DofConstraints::set_value(int dof, double value) { values_.emplace_back(dof, value); }

void DofConstraints::tie(std::vector<int> dofs) {
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  if (dofs.size() > 1) groups_.push_back(std::move(dofs));
}

DofConstraints::Resolved DofConstraints::resolve(int n) const {
  Resolved r;
  r.reduced.assign(static_cast<std::size_t>(n), -2);
  r.fixed_value.assign(static_cast<std::size_t>(n), 0.0);
  r.is_fixed.assign(static_cast<std::size_t>(n), false);
  for (const auto& [dof, value] : values_) {
    require(dof >= 0 && dof < n, ErrorKind::InvalidArgument, "constrained DOF out of range");
    if (r.is_fixed[dof]) {
      require(r.fixed_value[dof] == value, ErrorKind::OverConstrained,
              "DOF " + std::to_string(dof) + " has conflicting prescribed values");
    }
    r.is_fixed[dof] = true;
    r.fixed_value[dof] = value;
  }
  std::vector<int> master(static_cast<std::size_t>(n), -1);
  for (const auto& g : groups_) {
    for (int dof : g) {
      require(dof >= 0 && dof < n, ErrorKind::InvalidArgument, "tied DOF out of range");
      require(!r.is_fixed[dof], ErrorKind::OverConstrained,
              "DOF " + std::to_string(dof) + " is both prescribed and tied");
      require(master[dof] < 0, ErrorKind::OverConstrained, "DOF " + std::to_string(dof) + " is in two tie groups");
      master[dof] = g.front();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (r.is_fixed[i]) {
      r.reduced[i] = -1;
    } else if (master[i] >= 0 && master[i] != i) {
      r.reduced[i] = r.reduced[master[i]];
    } else {
      r.reduced[i] = r.num_reduced++;
    }
  }
  return r;
}

void BoundarySpec::fix_u(const MultiPatchMesh& mesh, const std::vector<int>& nodes, int comp, double value) {
  for (int n : nodes) constraints.set_value(mesh.u_dof(n, comp), value);
}

void BoundarySpec::fix_phi(const MultiPatchMesh& mesh, const std::vector<int>& nodes, double value) {
  for (int n : nodes) constraints.set_value(mesh.phi_dof(n), value);
}

void BoundarySpec::equipotential(const MultiPatchMesh& mesh, const std::vector<int>& nodes) {
  std::vector<int> dofs;
  for (int n : nodes) dofs.push_back(mesh.phi_dof(n));
  constraints.tie(std::move(dofs));
}

void BoundarySpec::traction(const std::vector<EdgeRef>& edges, const Vec2& t) {
  for (const EdgeRef& e : edges) edge_loads.push_back({e, t, Vec2::Zero(), 0.0});
}

namespace {

void add_block(Triplets& trip, const SparseMatrix& m, int row0, int col0, double scale) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      trip.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()), scale * it.value());
    }
  }
}

}  // namespace

SparseMatrix CoupledSystem::full_matrix() const {
  const int N = num_nodes;
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(K_uu.nonZeros() + 2 * K_phiu.nonZeros() + K_phiphi.nonZeros() +
                                        K_I.nonZeros()));
  add_block(trip, K_uu, 0, 0, 1.0);
  add_block(trip, K_uphi, 0, 2 * N, 1.0);
  add_block(trip, K_phiu, 2 * N, 0, 1.0);
  add_block(trip, K_phiphi, 2 * N, 2 * N, -1.0);
  add_block(trip, K_I, 0, 0, 1.0);
  SparseMatrix A(3 * N, 3 * N);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SparseMatrix CoupledSystem::scaled_matrix() const {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(num_dofs());
  s.tail(num_nodes).setConstant(beta);
  SparseMatrix A = full_matrix();
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) it.valueRef() *= s(it.row()) * s(it.col());
  }
  return A;
}

Eigen::VectorXd CoupledSystem::scaled_rhs() const {
  Eigen::VectorXd f = F;
  f.tail(num_nodes) *= beta;
  return f;
}

Eigen::VectorXd load_vector(const MultiPatchMesh& mesh, const BoundarySpec& bc) {
  const int N = mesh.num_nodes();
  Eigen::VectorXd F = Eigen::VectorXd::Zero(3 * N);
  if (bc.body_force || bc.charge_density) {
    for (int p = 0; p < mesh.num_patches(); ++p) {
      for_each_quadrature_point(mesh.patch(p), 1, [&](int, const PhysicalBasis& pb, double w) {
        const Vec2 b = bc.body_force ? bc.body_force(pb.map.x) : Vec2::Zero();
        const double q = bc.charge_density ? bc.charge_density(pb.map.x) : 0.0;
        for (int a = 0; a < pb.size(); ++a) {
          const int g = mesh.node(p, pb.indices[a]);
          F(2 * g) += w * pb.R(a) * b.x();
          F(2 * g + 1) += w * pb.R(a) * b.y();
          F(2 * N + g) -= w * pb.R(a) * q;
        }
      }, mesh.patch(p).spec().xi.degree() + 2);
    }
  }
  for (const EdgeLoad& load : bc.edge_loads) {
    require(load.edge.patch >= 0 && load.edge.patch < mesh.num_patches() && load.edge.edge >= 0 &&
                load.edge.edge < 4,
            ErrorKind::InvalidArgument, "edge load on a nonexistent boundary");
    const bool on_boundary = std::find(mesh.boundary_edges().begin(), mesh.boundary_edges().end(), load.edge) !=
                             mesh.boundary_edges().end();
    require(on_boundary, ErrorKind::InvalidArgument, "edge load applied to an interior interface");
    const NurbsPatch& patch = mesh.patch(load.edge.patch);
    const KnotVector& kv = patch.edge_knots(load.edge.edge);
    const QuadratureRule rule = gauss_rule(kv.degree() + 2);
    const auto bp = kv.breakpoints();
    for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
      const double len = bp[e + 1] - bp[e];
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double s = bp[e] + 0.5 * (rule.points[g] + 1.0) * len;
        const auto [xi, eta] = edge_parameter(load.edge.edge, s);
        const PhysicalBasis pb = patch.physical_basis(xi, eta, 1);
        const Vec2 t = pb.map.J.col(load.edge.edge % 2 == 0 ? 0 : 1);
        const double w = rule.weights[g] * 0.5 * len * t.norm();
        const Vec2 n = patch.outward_normal(load.edge.edge, s);
        for (int a = 0; a < pb.size(); ++a) {
          const int node = mesh.node(load.edge.patch, pb.indices[a]);
          const double dn = pb.dR.row(a).dot(n);
          F(2 * node) += w * (pb.R(a) * load.traction.x() + dn * load.double_traction.x());
          F(2 * node + 1) += w * (pb.R(a) * load.traction.y() + dn * load.double_traction.y());
          F(2 * N + node) -= w * pb.R(a) * load.surface_charge;
        }
      }
    }
  }
  for (const PointLoad& pl : bc.point_loads) {
    require(pl.node >= 0 && pl.node < N && (pl.component == 0 || pl.component == 1), ErrorKind::InvalidArgument,
            "point load on a nonexistent node or component");
    F(2 * pl.node + pl.component) += pl.value;
  }
  return F;
}

CoupledSystem assemble(const MultiPatchMesh& mesh, const MaterialSet& material, const BoundarySpec& bc,
                       const AssemblyOptions& opts) {
  material.validate();
  require(opts.beta > 0.0, ErrorKind::InvalidArgument, "scaling parameter must be positive");
  require(!opts.tau || *opts.tau >= 0.0, ErrorKind::InvalidArgument, "penalty parameter must be non-negative");
  require(opts.alpha >= 0.0, ErrorKind::InvalidArgument, "penalty factor must be non-negative");
  const MaterialMatrices mat(material);
  const int N = mesh.num_nodes();

  Triplets tuu, tpu, tpp;
  for (int p = 0; p < mesh.num_patches(); ++p) {
    const NurbsPatch& patch = mesh.patch(p);
    const int nex = patch.spec().xi.num_elements() * patch.spec().eta.num_elements();
    std::vector<LocalBlocks> blocks(static_cast<std::size_t>(nex));
    std::vector<std::vector<int>> locals(static_cast<std::size_t>(nex));
    for_each_quadrature_point(patch, 2, [&](int el, const PhysicalBasis& pb, double w) {
      if (locals[el].empty()) locals[el] = pb.indices;
      accumulate(blocks[el], pb, w, mat);
    });
    for (int el = 0; el < nex; ++el) {
      const auto& loc = locals[el];
      const auto& blk = blocks[el];
      const int n = static_cast<int>(loc.size());
      std::vector<int> g(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) g[a] = mesh.node(p, loc[a]);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) tuu.emplace_back(2 * g[a] + c, 2 * g[b] + d, blk.K_uu(2 * a + c, 2 * b + d));
            tpu.emplace_back(g[a], 2 * g[b] + c, blk.K_phiu(a, 2 * b + c));
          }
          tpp.emplace_back(g[a], g[b], blk.K_phiphi(a, b));
        }
      }
    }
  }

  CoupledSystem sys;
  sys.num_nodes = N;
  sys.beta = opts.beta;
  sys.K_uu.resize(2 * N, 2 * N);
  sys.K_uu.setFromTriplets(tuu.begin(), tuu.end());
  sys.K_phiu.resize(N, 2 * N);
  sys.K_phiu.setFromTriplets(tpu.begin(), tpu.end());
  sys.K_uphi = sys.K_phiu.transpose();
  sys.K_phiphi.resize(N, N);
  sys.K_phiphi.setFromTriplets(tpp.begin(), tpp.end());

  Triplets ti, tp;
  for (const InterfaceEdge& edge : mesh.interfaces()) {
    const double tau =
        opts.tau ? *opts.tau : stabilization_tau(opts.alpha, material.E, material.length_scale, edge.h);
    const InterfaceBlock blk = interface_block(mesh, edge, mat, tau);
    const int nd = static_cast<int>(blk.dofs.size());
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        ti.emplace_back(blk.dofs[i], blk.dofs[j], blk.K(i, j));
        if (tau > 0.0) tp.emplace_back(blk.dofs[i], blk.dofs[j], blk.K_penalty(i, j));
      }
    }
  }
  sys.K_I.resize(3 * N, 3 * N);
  sys.K_I.setFromTriplets(ti.begin(), ti.end());
  sys.K_I_penalty.resize(3 * N, 3 * N);
  sys.K_I_penalty.setFromTriplets(tp.begin(), tp.end());

  sys.F = load_vector(mesh, bc);
  sys.constraints = bc.constraints;
  return sys;
}

}  // namespace flexoiga
