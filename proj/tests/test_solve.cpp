#include "flexoiga/error.hpp"
#include "flexoiga/solve.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flexoiga;

namespace {

MaterialSet elastic_only() {
  MaterialSet m = material_preset("coupled");
  m.e11 = m.e15 = m.e21 = m.e22 = 0.0;
  m.mu11 = m.mu12 = m.mu44 = 0.0;
  return m;
}

struct Beam {
  MultiPatchMesh mesh;
  BoundarySpec bc;
};

// Cantilever of length L and thickness t in np patches, clamped at x = 0,
// grounded at the bottom and loaded by a resultant P (per unit depth) at x = L.
Beam cantilever(double L, double t, int np, int ex, int ey, double P) {
  std::vector<NurbsPatch> ps;
  for (int i = 0; i < np; ++i) {
    const double x0 = L * i / np, x1 = L * (i + 1) / np;
    ps.push_back(NurbsPatch::bilinear({Vec2(x0, 0), Vec2(x1, 0), Vec2(x1, t), Vec2(x0, t)}, 3, ex, ey));
  }
  Beam b{MultiPatchMesh(ps), {}};
  const double tol = 1e-9 * L;
  const auto left = b.mesh.nodes_on_edges(b.mesh.select_boundary_edges([&](const Vec2& x) { return x.x() < tol; }));
  const auto bottom = b.mesh.nodes_on_edges(b.mesh.select_boundary_edges([&](const Vec2& x) { return x.y() < tol; }));
  b.bc.fix_u(b.mesh, left, 0, 0.0);
  b.bc.fix_u(b.mesh, left, 1, 0.0);
  b.bc.fix_phi(b.mesh, bottom, 0.0);
  b.bc.traction(b.mesh.select_boundary_edges([&](const Vec2& x) { return x.x() > L - tol; }), Vec2(0, P / t));
  return b;
}

double tip_deflection(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialSet& mat, double L, double t) {
  return sample_fields(sol, mesh, mat, {Vec2(L, 0.5 * t)})[0].u.y();
}

}  // namespace

TEST(SolveTest, SlenderCantileverMatchesBeamTheory) {
  const double L = 20e-6, t = 1e-6, P = -1.0;
  MaterialSet mat = elastic_only();
  mat.nu = 0.0;
  const Beam b = cantilever(L, t, 2, 16, 2, P);
  AssemblyOptions opts;
  opts.tau = 1e8;
  const SolutionField sol = solve(assemble(b.mesh, mat, b.bc, opts));
  // P L^3 / (3 E I) plus the Timoshenko shear term P L / (k G A), k = 5/6, G = E/2.
  const double I = t * t * t / 12.0;
  const double expect = P * L * L * L / (3 * mat.E * I) + P * L / (5.0 / 6.0 * 0.5 * mat.E * t);
  EXPECT_NEAR(tip_deflection(sol, b.mesh, mat, L, t), expect, 0.01 * std::abs(expect));
  EXPECT_LT(sol.residual, 1e-9);
  EXPECT_GE(max_displacement(sol, b.mesh), std::abs(tip_deflection(sol, b.mesh, mat, L, t)) * 0.999);
}

TEST(SolveTest, StrainEnergyIsHalfTheExternalWork) {
  const MaterialSet mat = elastic_only();
  const Beam b = cantilever(10e-6, 1e-6, 1, 6, 2, -1.0);
  const CoupledSystem sys = assemble(b.mesh, mat, b.bc, AssemblyOptions{});
  const SolutionField sol = solve(sys);
  const EnergyReport en = energies(sol, b.mesh, mat);
  const double work = 0.5 * sys.F.head(sol.u.size()).dot(sol.u);
  EXPECT_NEAR(en.W_mech, work, 1e-10 * work);
  EXPECT_NEAR(en.W_work, en.W_mech, 1e-10 * work);
  EXPECT_NEAR(en.W_elec, 0.0, 1e-30);
  EXPECT_THROW(interface_jump_metric(sol, b.mesh, mat), Error);
}

TEST(SolveTest, ScalingParameterDoesNotChangeTheSolution) {
  const MaterialSet mat = material_preset("coupled");
  const Beam b = cantilever(10e-6, 1e-6, 2, 2, 1, -1.0);
  AssemblyOptions lo, hi;
  lo.tau = hi.tau = 4e10;
  lo.beta = 1e8;
  hi.beta = 1e12;
  const SolutionField a = solve(assemble(b.mesh, mat, b.bc, lo));
  const SolutionField c = solve(assemble(b.mesh, mat, b.bc, hi));
  EXPECT_LE((a.u - c.u).norm(), 1e-6 * a.u.norm());
  EXPECT_LE((a.phi - c.phi).norm(), 1e-6 * a.phi.norm());
}

TEST(SolveTest, UnconstrainedSystemIsReportedAsSolverFailure) {
  const Beam b = cantilever(10e-6, 1e-6, 1, 2, 1, -1.0);
  try {
    BoundarySpec loads_only = b.bc;
    loads_only.constraints = DofConstraints{};
    solve(assemble(b.mesh, material_preset("coupled"), loads_only, AssemblyOptions{}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SolverFailure);
  }
}

TEST(SolveTest, LocateInvertsTheMap) {
  const MultiPatchMesh mesh({NurbsPatch::bilinear({Vec2(0, 0), Vec2(2, 0.3), Vec2(1.5, 1.6), Vec2(0.2, 1.1)}, 3, 2, 2)});
  const Vec2 x = mesh.patch(0).map_point(0.31, 0.72);
  const auto loc = locate(mesh, x);
  ASSERT_TRUE(loc.has_value());
  EXPECT_NEAR(loc->xi, 0.31, 1e-9);
  EXPECT_NEAR(loc->eta, 0.72, 1e-9);
  EXPECT_FALSE(locate(mesh, Vec2(5, 5)).has_value());
  SolutionField sol;
  sol.u = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  sol.phi = Eigen::VectorXd::Zero(mesh.num_nodes());
  try {
    sample_fields(sol, mesh, MaterialSet{}, {Vec2(5, 5)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
}

TEST(SolveTest, TwoPatchJumpShrinksWithPenalty) {
  const MaterialSet mat = material_preset("coupled");
  const Beam b = cantilever(10e-6, 1e-6, 2, 1, 1, -1.0);
  double prev = 1e300;
  for (double tau : {0.0, 1e6, 1e8, 1e10}) {
    AssemblyOptions o;
    o.tau = tau;
    const double j = interface_jump_metric(solve(assemble(b.mesh, mat, b.bc, o)), b.mesh, mat);
    EXPECT_LE(j, prev);
    prev = j;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(AnalyticKemTest, NormalizedCurves) {
  const MaterialSet m = material_preset("one_d");
  for (double hp : {1.0, 2.0, 5.0}) {
    const double t = hp * m.mu12 / std::abs(m.e21);
    EXPECT_NEAR(normalized_thickness(m, t), hp, 1e-12);
    EXPECT_NEAR(analytical_kem(m, t, KemMode::FlexoOnly).normalized, std::sqrt(12.0) / hp, 1e-12);
    EXPECT_NEAR(analytical_kem(m, t, KemMode::Combined).normalized, std::sqrt(1 + 12.0 / (hp * hp)), 1e-12);
    EXPECT_NEAR(analytical_kem(m, t, KemMode::PiezoOnly).normalized, 1.0, 1e-12);
  }
  EXPECT_THROW(analytical_kem(m, 0.0, KemMode::Combined), Error);
  EXPECT_EQ(parse_kem_mode("flexo_only"), KemMode::FlexoOnly);
  EXPECT_EQ(to_string(KemMode::Combined), "combined");
  EXPECT_THROW(parse_kem_mode("both"), Error);
}
