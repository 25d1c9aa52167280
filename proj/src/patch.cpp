#include "flexoiga/patch.hpp"

#include "flexoiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flexoiga {

EdgePoint edge_parameter(int edge, double s) {
  switch (edge) {
    case 0: return {s, 0.0};
    case 1: return {1.0, s};
    case 2: return {s, 1.0};
    case 3: return {0.0, s};
    default: fail(ErrorKind::InvalidArgument, "edge index must be 0..3");
  }
}

NurbsPatch::NurbsPatch(PatchBasisSpec spec, std::vector<Vec2> control_points, std::vector<double> weights)
    : spec_(std::move(spec)), cps_(std::move(control_points)), weights_(std::move(weights)) {
  require(static_cast<int>(cps_.size()) == spec_.num_basis(), ErrorKind::InvalidArgument,
          "control net has " + std::to_string(cps_.size()) + " points, basis needs " +
              std::to_string(spec_.num_basis()));
  require(weights_.size() == cps_.size(), ErrorKind::InvalidArgument, "one weight per control point required");
  for (double w : weights_) require(w > 0.0, ErrorKind::InvalidArgument, "NURBS weights must be positive");
}

NurbsPatch NurbsPatch::bilinear(const std::array<Vec2, 4>& corners, int degree, int n_xi, int n_eta) {
  PatchBasisSpec spec{make_uniform_knot_vector(degree, n_xi), make_uniform_knot_vector(degree, n_eta)};
  auto greville = [](const KnotVector& kv) {
    std::vector<double> g(static_cast<std::size_t>(kv.num_basis()));
    const int p = kv.degree();
    for (int i = 0; i < kv.num_basis(); ++i) {
      double s = 0.0;
      for (int k = 1; k <= p; ++k) s += kv.knots()[static_cast<std::size_t>(i + k)];
      g[static_cast<std::size_t>(i)] = s / p;
    }
    return g;
  };
  const auto gx = greville(spec.xi);
  const auto gy = greville(spec.eta);
  std::vector<Vec2> cps;
  cps.reserve(gx.size() * gy.size());
  for (double t : gy) {
    for (double s : gx) {
      cps.push_back((1 - s) * (1 - t) * corners[0] + s * (1 - t) * corners[1] + s * t * corners[2] +
                    (1 - s) * t * corners[3]);
    }
  }
  std::vector<double> w(cps.size(), 1.0);
  NurbsPatch patch(std::move(spec), std::move(cps), std::move(w));
  const double cross = (corners[1] - corners[0]).x() * (corners[3] - corners[0]).y() -
                       (corners[1] - corners[0]).y() * (corners[3] - corners[0]).x();
  require(cross > 0.0, ErrorKind::DegenerateGeometry, "bilinear patch corners must be counter-clockwise");
  return patch;
}

Vec2 NurbsPatch::map_point(double xi, double eta) const {
  const NurbsBasis2D b = nurbs_basis_2d(spec_, weights_, xi, eta, 0);
  Vec2 x = Vec2::Zero();
  for (std::size_t a = 0; a < b.size(); ++a) x += b.R[a] * cps_[static_cast<std::size_t>(b.indices[a])];
  return x;
}

namespace {

MappingDerivs mapping_from(const NurbsBasis2D& b, const std::vector<Vec2>& cps, int n_derivs) {
  MappingDerivs m;
  for (std::size_t a = 0; a < b.size(); ++a) {
    const Vec2& P = cps[static_cast<std::size_t>(b.indices[a])];
    m.x += b.R[a] * P;
    if (n_derivs >= 1) {
      m.J.col(0) += b.dR[a][0] * P;
      m.J.col(1) += b.dR[a][1] * P;
    }
    if (n_derivs >= 2) {
      for (int k = 0; k < 2; ++k) {
        m.H_geo[k](0, 0) += b.d2R[a][0] * P[k];
        m.H_geo[k](0, 1) += b.d2R[a][1] * P[k];
        m.H_geo[k](1, 1) += b.d2R[a][2] * P[k];
      }
    }
  }
  for (auto& H : m.H_geo) H(1, 0) = H(0, 1);
  m.detJ = m.J.determinant();
  return m;
}

}  // namespace

MappingDerivs NurbsPatch::mapping_derivatives(double xi, double eta) const {
  const MappingDerivs m = mapping_from(nurbs_basis_2d(spec_, weights_, xi, eta, 2), cps_, 2);
  require(m.detJ > 0.0, ErrorKind::DegenerateGeometry, "non-positive mapping Jacobian");
  return m;
}

PhysicalBasis NurbsPatch::physical_basis(const NurbsBasis2D& param, int n_derivs) const {
  const int deriv_level = std::max(n_derivs, 1);
  PhysicalBasis out;
  out.map = mapping_from(param, cps_, deriv_level);
  require(out.map.detJ > 0.0, ErrorKind::DegenerateGeometry, "non-positive mapping Jacobian");
  const int n = static_cast<int>(param.size());
  out.indices = param.indices;
  out.R = Eigen::Map<const Eigen::VectorXd>(param.R.data(), n);
  const Eigen::Matrix2d Jinv = out.map.J.inverse();
  out.dR.resize(n, 2);
  for (int a = 0; a < n; ++a) {
    const Eigen::RowVector2d g(param.dR[a][0], param.dR[a][1]);
    out.dR.row(a) = g * Jinv;
  }
  if (n_derivs >= 2) {
    out.d2R.resize(n, 3);
    for (int a = 0; a < n; ++a) {
      Eigen::Matrix2d Hp;
      Hp << param.d2R[a][0], param.d2R[a][1], param.d2R[a][1], param.d2R[a][2];
      Hp -= out.dR(a, 0) * out.map.H_geo[0] + out.dR(a, 1) * out.map.H_geo[1];
      const Eigen::Matrix2d Hx = Jinv.transpose() * Hp * Jinv;
      out.d2R.row(a) << Hx(0, 0), Hx(0, 1), Hx(1, 1);
    }
  }
  return out;
}

PhysicalBasis NurbsPatch::physical_basis(double xi, double eta, int n_derivs) const {
  return physical_basis(nurbs_basis_2d(spec_, weights_, xi, eta, std::max(n_derivs, 1)), n_derivs);
}

std::vector<int> NurbsPatch::edge_control_points(int edge) const {
  const int nx = spec_.num_xi(), ny = spec_.num_eta();
  std::vector<int> ids;
  switch (edge) {
    case 0: for (int i = 0; i < nx; ++i) ids.push_back(control_index(i, 0)); break;
    case 1: for (int j = 0; j < ny; ++j) ids.push_back(control_index(nx - 1, j)); break;
    case 2: for (int i = 0; i < nx; ++i) ids.push_back(control_index(i, ny - 1)); break;
    case 3: for (int j = 0; j < ny; ++j) ids.push_back(control_index(0, j)); break;
    default: fail(ErrorKind::InvalidArgument, "edge index must be 0..3");
  }
  return ids;
}

Vec2 NurbsPatch::edge_tangent(int edge, double s) const {
  const auto [xi, eta] = edge_parameter(edge, s);
  const NurbsBasis2D b = nurbs_basis_2d(spec_, weights_, xi, eta, 1);
  const MappingDerivs m = mapping_from(b, cps_, 1);
  return m.J.col(edge % 2 == 0 ? 0 : 1);
}

Vec2 NurbsPatch::outward_normal(int edge, double s) const {
  const Vec2 t = edge_tangent(edge, s);
  const Vec2 n = edge < 2 ? Vec2(t.y(), -t.x()) : Vec2(-t.y(), t.x());
  return n.normalized();
}

double NurbsPatch::area() const {
  const QuadratureRule gx = gauss_rule(spec_.xi.degree() + 2);
  const QuadratureRule gy = gauss_rule(spec_.eta.degree() + 2);
  const auto bx = spec_.xi.breakpoints();
  const auto by = spec_.eta.breakpoints();
  double a = 0.0;
  for (std::size_t ex = 0; ex + 1 < bx.size(); ++ex) {
    for (std::size_t ey = 0; ey + 1 < by.size(); ++ey) {
      const double lx = bx[ex + 1] - bx[ex], ly = by[ey + 1] - by[ey];
      for (std::size_t i = 0; i < gx.size(); ++i) {
        for (std::size_t j = 0; j < gy.size(); ++j) {
          const double xi = bx[ex] + 0.5 * (gx.points[i] + 1) * lx;
          const double eta = by[ey] + 0.5 * (gy.points[j] + 1) * ly;
          const MappingDerivs m = mapping_from(nurbs_basis_2d(spec_, weights_, xi, eta, 1), cps_, 1);
          a += m.detJ * gx.weights[i] * gy.weights[j] * 0.25 * lx * ly;
        }
      }
    }
  }
  return a;
}

std::array<Vec2, 4> NurbsPatch::corners() const {
  const int nx = spec_.num_xi(), ny = spec_.num_eta();
  return {cps_[control_index(0, 0)], cps_[control_index(nx - 1, 0)], cps_[control_index(nx - 1, ny - 1)],
          cps_[control_index(0, ny - 1)]};
}

}  // namespace flexoiga
