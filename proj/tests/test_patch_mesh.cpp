#include "flexoiga/error.hpp"
#include "flexoiga/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flexoiga;

namespace {

NurbsPatch unit_square(int degree = 2, int n = 1, Vec2 offset = Vec2::Zero()) {
  return NurbsPatch::bilinear({offset + Vec2(0, 0), offset + Vec2(1, 0), offset + Vec2(1, 1), offset + Vec2(0, 1)},
                              degree, n, n);
}

// Exact quarter of an annulus, radii 1 and 2, as a rational quadratic x linear patch.
NurbsPatch quarter_annulus() {
  const double s = std::sqrt(0.5);
  PatchBasisSpec spec{make_uniform_knot_vector(2, 1), make_uniform_knot_vector(1, 1)};
  std::vector<Vec2> cps = {Vec2(0, 1), Vec2(1, 1), Vec2(1, 0), Vec2(0, 2), Vec2(2, 2), Vec2(2, 0)};
  return NurbsPatch(spec, cps, {1, s, 1, 1, s, 1});
}

}  // namespace

TEST(NurbsPatchTest, QuarterAnnulusIsExact) {
  const NurbsPatch p = quarter_annulus();
  for (double xi : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    EXPECT_NEAR(p.map_point(xi, 0.0).norm(), 1.0, 1e-14);
    EXPECT_NEAR(p.map_point(xi, 1.0).norm(), 2.0, 1e-14);
  }
  // Gauss quadrature of a rational Jacobian is close but not exact.
  EXPECT_NEAR(p.area(), 0.75 * M_PI, 1e-4);
}

TEST(NurbsPatchTest, BilinearMapMatchesCornerInterpolation) {
  const std::array<Vec2, 4> c = {Vec2(0, 0), Vec2(2, 0.1), Vec2(1.7, 1.3), Vec2(-0.2, 0.9)};
  const NurbsPatch p = NurbsPatch::bilinear(c, 3, 2, 3);
  for (double xi : {0.0, 0.3, 1.0}) {
    for (double eta : {0.0, 0.6, 1.0}) {
      const Vec2 expect = (1 - xi) * (1 - eta) * c[0] + xi * (1 - eta) * c[1] + xi * eta * c[2] + (1 - xi) * eta * c[3];
      EXPECT_NEAR((p.map_point(xi, eta) - expect).norm(), 0.0, 1e-14);
    }
  }
  // shoelace
  const double shoelace = 0.5 * ((c[0].x() * c[1].y() - c[1].x() * c[0].y()) + (c[1].x() * c[2].y() - c[2].x() * c[1].y()) +
                                 (c[2].x() * c[3].y() - c[3].x() * c[2].y()) + (c[3].x() * c[0].y() - c[0].x() * c[3].y()));
  EXPECT_NEAR(p.area(), shoelace, 1e-13);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR((p.corners()[k] - c[k]).norm(), 0.0, 1e-14);
}

TEST(NurbsPatchTest, ClockwiseCornersAreRejected) {
  try {
    NurbsPatch::bilinear({Vec2(0, 0), Vec2(0, 1), Vec2(1, 1), Vec2(1, 0)}, 2, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }
}

TEST(NurbsPatchTest, OutwardNormalsOfUnitSquare) {
  const NurbsPatch p = unit_square();
  const Vec2 expect[4] = {Vec2(0, -1), Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0)};
  for (int e = 0; e < 4; ++e) EXPECT_NEAR((p.outward_normal(e, 0.4) - expect[e]).norm(), 0.0, 1e-14) << e;
  EXPECT_EQ(p.edge_control_points(0), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(p.edge_control_points(1), (std::vector<int>{2, 5, 8}));
  EXPECT_EQ(p.edge_control_points(3), (std::vector<int>{0, 3, 6}));
}

// A distorted quad reproduces a full quadratic exactly, so the pushed-forward
// Hessian must be constant.
TEST(NurbsPatchTest, PhysicalSecondDerivativesReproduceQuadratic) {
  const NurbsPatch p = NurbsPatch::bilinear({Vec2(0, 0), Vec2(2, 0.3), Vec2(1.5, 1.6), Vec2(0.2, 1.1)}, 3, 2, 2);
  auto f = [](const Vec2& x) { return 1.0 + 2 * x.x() - x.y() + 3 * x.x() * x.x() + x.x() * x.y() - 2 * x.y() * x.y(); };
  const int n = p.num_control_points();
  const int nx = p.spec().num_xi();
  auto greville = [](const KnotVector& kv, int i) {
    double g = 0.0;
    for (int k = 1; k <= kv.degree(); ++k) g += kv.knots()[i + k];
    return g / kv.degree();
  };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int r = 0; r < n; ++r) {
    const double xi = greville(p.spec().xi, r % nx), eta = greville(p.spec().eta, r / nx);
    const PhysicalBasis pb = p.physical_basis(xi, eta, 0);
    for (int a = 0; a < pb.size(); ++a) A(r, pb.indices[a]) = pb.R(a);
    rhs(r) = f(p.map_point(xi, eta));
  }
  const Eigen::VectorXd c = A.lu().solve(rhs);
  for (double xi : {0.1, 0.45, 0.8}) {
    for (double eta : {0.2, 0.5, 0.95}) {
      const PhysicalBasis pb = p.physical_basis(xi, eta, 2);
      double v = 0, fx = 0, fy = 0, fxx = 0, fxy = 0, fyy = 0;
      for (int a = 0; a < pb.size(); ++a) {
        const double ca = c(pb.indices[a]);
        v += pb.R(a) * ca;
        fx += pb.dR(a, 0) * ca;
        fy += pb.dR(a, 1) * ca;
        fxx += pb.d2R(a, 0) * ca;
        fxy += pb.d2R(a, 1) * ca;
        fyy += pb.d2R(a, 2) * ca;
      }
      const Vec2 x = pb.map.x;
      EXPECT_NEAR(v, f(x), 1e-11);
      EXPECT_NEAR(fx, 2 + 6 * x.x() + x.y(), 1e-10);
      EXPECT_NEAR(fy, -1 + x.x() - 4 * x.y(), 1e-10);
      EXPECT_NEAR(fxx, 6.0, 1e-8);
      EXPECT_NEAR(fxy, 1.0, 1e-8);
      EXPECT_NEAR(fyy, -4.0, 1e-8);
    }
  }
}

TEST(MultiPatchMeshTest, TwoSquaresShareOneInterface) {
  const MultiPatchMesh mesh({unit_square(2, 1), unit_square(2, 1, Vec2(1, 0))});
  EXPECT_EQ(mesh.num_nodes(), 15);
  EXPECT_EQ(mesh.num_dofs(), 45);
  ASSERT_EQ(mesh.interfaces().size(), 1u);
  const InterfaceEdge& ie = mesh.interfaces()[0];
  EXPECT_EQ(ie.left, (EdgeRef{0, 1}));
  EXPECT_EQ(ie.right, (EdgeRef{1, 3}));
  EXPECT_FALSE(ie.reversed);
  EXPECT_NEAR(ie.length, 1.0, 1e-14);
  EXPECT_NEAR(ie.h, 1.0, 1e-14);
  EXPECT_EQ(mesh.boundary_edges().size(), 6u);
  for (int k = 0; k < 3; ++k) {
    const int a = mesh.patch(0).edge_control_points(1)[k], b = mesh.patch(1).edge_control_points(3)[k];
    EXPECT_EQ(mesh.node(0, a), mesh.node(1, b));
  }
  EXPECT_NEAR(mesh.total_area(), 2.0, 1e-14);
}

TEST(MultiPatchMeshTest, OppositeOrientationIsReversed) {
  // Second square listed with corners rotated by two, so its shared edge xi = 1 runs top to bottom.
  const NurbsPatch right = NurbsPatch::bilinear({Vec2(2, 1), Vec2(1, 1), Vec2(1, 0), Vec2(2, 0)}, 2, 2, 2);
  const MultiPatchMesh mesh({unit_square(2, 2), right});
  ASSERT_EQ(mesh.interfaces().size(), 1u);
  EXPECT_EQ(mesh.interfaces()[0].right.edge, 1);
  EXPECT_TRUE(mesh.interfaces()[0].reversed);
  EXPECT_NEAR(mesh.interfaces()[0].h, 0.5, 1e-14);
  EXPECT_EQ(mesh.num_nodes(), 2 * 16 - 4);
}

TEST(MultiPatchMeshTest, HangingNodeIsNonconforming) {
  std::vector<NurbsPatch> ps = {NurbsPatch::bilinear({Vec2(0, 0), Vec2(1, 0), Vec2(1, 2), Vec2(0, 2)}, 2, 1, 1),
                                unit_square(2, 1, Vec2(1, 0)), unit_square(2, 1, Vec2(1, 1))};
  try {
    MultiPatchMesh mesh(ps);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonconformingInterface);
  }
}

TEST(MultiPatchMeshTest, MismatchedRefinementIsNonconforming) {
  EXPECT_THROW(MultiPatchMesh({unit_square(2, 1), unit_square(2, 2, Vec2(1, 0))}), Error);
}

TEST(MultiPatchMeshTest, BoundarySelectionAndNodes) {
  const MultiPatchMesh mesh({unit_square(3, 2), unit_square(3, 2, Vec2(1, 0))});
  const auto bottom = mesh.select_boundary_edges([](const Vec2& x) { return x.y() < 1e-12; });
  EXPECT_EQ(bottom.size(), 2u);
  EXPECT_EQ(mesh.nodes_on_edges(bottom).size(), 9u);
  const auto [lo, hi] = mesh.bounding_box();
  EXPECT_NEAR((lo - Vec2(0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((hi - Vec2(2, 1)).norm(), 0.0, 1e-15);
}
