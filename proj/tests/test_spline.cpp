#include "flexoiga/error.hpp"
#include "flexoiga/spline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace flexoiga;

namespace {

// Textbook recursive definition with the 0/0 = 0 convention.
double cox_de_boor(const std::vector<double>& U, int i, int p, double x) {
  if (p == 0) {
    const bool last = U[i + 1] == U.back() && x == U.back() && U[i] < U[i + 1];
    return (U[i] <= x && x < U[i + 1]) || last ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (U[i + p] != U[i]) a = (x - U[i]) / (U[i + p] - U[i]) * cox_de_boor(U, i, p - 1, x);
  if (U[i + p + 1] != U[i + 1]) b = (U[i + p + 1] - x) / (U[i + p + 1] - U[i + 1]) * cox_de_boor(U, i + 1, p - 1, x);
  return a + b;
}

KnotVector nonuniform_cubic() { return KnotVector(3, {0, 0, 0, 0, 0.2, 0.5, 0.5, 0.7, 1, 1, 1, 1}); }

}  // namespace

TEST(KnotVectorTest, OpenUniformKnots) {
  EXPECT_EQ(make_open_knot_vector(2, 4).knots(), (std::vector<double>{0, 0, 0, 0.5, 1, 1, 1}));
  EXPECT_EQ(make_uniform_knot_vector(3, 1).knots(), (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(make_uniform_knot_vector(2, 4).num_elements(), 4);
  EXPECT_EQ(make_uniform_knot_vector(2, 4).num_basis(), 6);
}

TEST(KnotVectorTest, RejectsMalformedVectors) {
  EXPECT_THROW(KnotVector(2, {0, 0, 0, 0.6, 0.4, 1, 1, 1}), Error);
  EXPECT_THROW(KnotVector(2, {0, 0, 0.5, 1, 1, 1}), Error);
  EXPECT_THROW(KnotVector(2, {0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1}), Error);
  EXPECT_NO_THROW(KnotVector(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1}));
}

TEST(KnotVectorTest, SpanAtRightEndIsLastNonEmpty) {
  const KnotVector kv = nonuniform_cubic();
  EXPECT_EQ(kv.find_span(1.0), 7);
  EXPECT_EQ(kv.find_span(0.5), 6);
  EXPECT_EQ(kv.find_span(0.0), 3);
}

TEST(BsplineBasisTest, MatchesRecursiveDefinition) {
  const KnotVector kv = nonuniform_cubic();
  for (double x : {0.0, 0.1, 0.2, 0.33, 0.5, 0.61, 0.7, 0.95, 1.0}) {
    const BasisEval b = bspline_basis(kv, x);
    for (int a = 0; a <= 3; ++a) {
      EXPECT_NEAR(b.values[a], cox_de_boor(kv.knots(), b.first() + a, 3, x), 1e-14) << "x=" << x;
    }
  }
}

TEST(BsplineBasisTest, SingleSpanIsBernstein) {
  const KnotVector kv = make_uniform_knot_vector(2, 1);
  const BasisEval b = bspline_basis(kv, 0.5, 2);
  EXPECT_NEAR(b.values[0], 0.25, 1e-15);
  EXPECT_NEAR(b.values[1], 0.5, 1e-15);
  EXPECT_NEAR(b.values[2], 0.25, 1e-15);
  // d/dt of (1-t)^2, 2t(1-t), t^2 at t = 1/2
  EXPECT_NEAR(b.d1[0], -1.0, 1e-14);
  EXPECT_NEAR(b.d1[1], 0.0, 1e-14);
  EXPECT_NEAR(b.d1[2], 1.0, 1e-14);
  EXPECT_NEAR(b.d2[0], 2.0, 1e-13);
  EXPECT_NEAR(b.d2[1], -4.0, 1e-13);
  EXPECT_NEAR(b.d2[2], 2.0, 1e-13);
}

TEST(BsplineBasisTest, DerivativesMatchFiniteDifferences) {
  const KnotVector kv = nonuniform_cubic();
  const double h = 1e-6;
  for (double x : {0.05, 0.3, 0.42, 0.6, 0.85}) {
    const BasisEval b = bspline_basis(kv, x, 2);
    const BasisEval bp = bspline_basis(kv, x + h, 1), bm = bspline_basis(kv, x - h, 1);
    for (int a = 0; a <= 3; ++a) {
      EXPECT_NEAR(b.d1[a], (bp.values[a] - bm.values[a]) / (2 * h), 1e-6);
      EXPECT_NEAR(b.d2[a], (bp.d1[a] - bm.d1[a]) / (2 * h), 1e-4);
    }
  }
}

TEST(GaussRuleTest, IntegratesPolynomialsExactly) {
  const QuadratureRule r3 = gauss_rule(3);
  double s = 0.0;
  for (std::size_t i = 0; i < r3.size(); ++i) s += r3.weights[i] * std::pow(r3.points[i], 4);
  EXPECT_NEAR(s, 0.4, 1e-15);
  for (int n = 1; n <= 16; ++n) {
    const QuadratureRule r = gauss_rule(n);
    double w = 0.0, top = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      w += r.weights[i];
      top += r.weights[i] * std::pow(r.points[i], 2 * n - 2);
    }
    EXPECT_NEAR(w, 2.0, 1e-13) << n;
    EXPECT_NEAR(top, 2.0 / (2 * n - 1), 1e-13) << n;
  }
  EXPECT_THROW(gauss_rule(0), Error);
}

TEST(BezierExtractionTest, ReconstructsBasis) {
  const KnotVector kv = nonuniform_cubic();
  const BezierExtraction ext = bezier_extract(kv);
  ASSERT_EQ(ext.num_elements(), 4);
  for (int e = 0; e < ext.num_elements(); ++e) {
    const auto [lo, hi] = ext.element_bounds[e];
    for (double t : {0.0, 0.25, 0.5, 0.9}) {
      const BasisEval direct = bspline_basis(kv, lo + t * (hi - lo), 2);
      const BasisEval viaext = extracted_basis(ext, e, t, 2);
      ASSERT_EQ(direct.first(), viaext.first());
      for (int a = 0; a <= 3; ++a) {
        EXPECT_NEAR(direct.values[a], viaext.values[a], 1e-13);
        EXPECT_NEAR(direct.d1[a], viaext.d1[a], 1e-11);
        EXPECT_NEAR(direct.d2[a], viaext.d2[a], 1e-9);
      }
    }
  }
}

TEST(NurbsBasisTest, PartitionOfUnityWithRandomWeights) {
  const PatchBasisSpec spec{nonuniform_cubic(), make_uniform_knot_vector(2, 3)};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> w(0.5, 2.0), u(0.0, 1.0);
  std::vector<double> weights(static_cast<std::size_t>(spec.num_basis()));
  for (double& x : weights) x = w(rng);
  for (int k = 0; k < 50; ++k) {
    const NurbsBasis2D b = nurbs_basis_2d(spec, weights, u(rng), u(rng), 2);
    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t a = 0; a < b.size(); ++a) {
      s += b.R[a];
      sx += b.dR[a][0];
      sy += b.dR[a][1];
      sxx += b.d2R[a][0];
      sxy += b.d2R[a][1];
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(sx, 0.0, 1e-12);
    EXPECT_NEAR(sy, 0.0, 1e-12);
    EXPECT_NEAR(sxx, 0.0, 1e-10);
    EXPECT_NEAR(sxy, 0.0, 1e-10);
  }
}

TEST(NurbsBasisTest, UnitWeightsReduceToTensorBsplines) {
  const PatchBasisSpec spec{nonuniform_cubic(), make_uniform_knot_vector(2, 2)};
  const std::vector<double> ones(static_cast<std::size_t>(spec.num_basis()), 1.0);
  const NurbsBasis2D b = nurbs_basis_2d(spec, ones, 0.37, 0.81);
  const BasisEval bx = bspline_basis(spec.xi, 0.37), by = bspline_basis(spec.eta, 0.81);
  for (std::size_t a = 0; a < b.size(); ++a) {
    const int i = b.indices[a] % spec.num_xi(), j = b.indices[a] / spec.num_xi();
    EXPECT_NEAR(b.R[a], bx.values[i - bx.first()] * by.values[j - by.first()], 1e-15);
  }
}
