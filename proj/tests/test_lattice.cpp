#include "flexoiga/error.hpp"
#include "flexoiga/lattice.hpp"

#include <gtest/gtest.h>

using namespace flexoiga;

namespace {

LatticeSpec spec_of(const std::string& topology, int nx = 1, int ny = 1) {
  LatticeSpec s;
  s.topology = topology;
  s.nx = nx;
  s.ny = ny;
  return s;
}

}  // namespace

TEST(LatticeTest, TopologyStrutCounts) {
  EXPECT_EQ(topology_struts("UC1").size(), 2u);
  EXPECT_EQ(topology_struts("UC2").size(), 3u);
  EXPECT_EQ(topology_struts("UC3").size(), 4u);
  EXPECT_EQ(topology_struts("UC4").size(), 3u);
  EXPECT_TRUE(topology_struts("SOLID").empty());
  try {
    topology_struts("UC9");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(LatticeTest, StrutHalvesSplitTheStrip) {
  const auto halves = build_strut(Vec2(0, 0), Vec2(3, 4), 0.2, 0.2, 2, 1);
  EXPECT_NEAR(halves[0].area(), 5 * 0.1, 1e-13);
  EXPECT_NEAR(halves[1].area(), 5 * 0.1, 1e-13);
  // Left half lies on the left of the direction p0 -> p1.
  const Vec2 c = halves[0].map_point(0.5, 0.5);
  EXPECT_GT(3 * c.y() - 4 * c.x(), 0.0);
}

TEST(LatticeTest, WidthHitsRelativeDensity) {
  for (const std::string t : {"UC1", "UC2", "UC3", "UC4"}) {
    const LatticeSpec s = spec_of(t);
    const double w = solve_strut_width(s);
    double area = 0.0;
    for (const Quad& q : lattice_quads(s, w)) {
      EXPECT_GT(quad_area(q), 0.0) << t;
      area += quad_area(q);
    }
    EXPECT_NEAR(area, s.rho * s.a * s.b, 1e-9 * s.a * s.b) << t;
    const MultiPatchMesh mesh = tessellate(s);
    EXPECT_NEAR(mesh.total_area(), s.rho * s.a * s.b, 1e-9 * s.a * s.b) << t;
  }
}

// A square frame of half-width w/2 walls: rho a b = 2 (a + b) (w/2) - 4 (w/2)^2.
TEST(LatticeTest, SquareFrameWidthClosedForm) {
  const LatticeSpec s = spec_of("UC3");
  const double w = solve_strut_width(s);
  const double h = 0.5 * w;
  EXPECT_NEAR(2 * (s.a + s.b) * h - 4 * h * h, s.rho * s.a * s.b, 1e-9 * s.a * s.b);
}

// Counts follow from the strut graph: UC1 has 4 strut halves per diagonal arm
// pair, a four-arm centre joint and corner joints on the walls.
TEST(LatticeTest, PatchAndInterfaceCounts) {
  struct Case {
    std::string topology;
    int n, patches, interfaces;
  };
  for (const Case& c : {Case{"UC1", 1, 24, 32}, Case{"UC2", 1, 12, 13}, Case{"UC3", 1, 12, 12},
                        Case{"UC4", 1, 18, 19}, Case{"SOLID", 2, 4, 4}, Case{"UC1", 5, 600, 880}}) {
    const MultiPatchMesh mesh = tessellate(spec_of(c.topology, c.n, c.n));
    EXPECT_EQ(mesh.num_patches(), c.patches) << c.topology << " " << c.n;
    EXPECT_EQ(static_cast<int>(mesh.interfaces().size()), c.interfaces) << c.topology << " " << c.n;
  }
}

TEST(LatticeTest, TessellationKeepsDensityAndBox) {
  const LatticeSpec s = spec_of("UC2", 2, 2);
  const MultiPatchMesh mesh = tessellate(s);
  EXPECT_NEAR(mesh.total_area() / (4 * s.a * s.b), s.rho, 0.01 * s.rho);
  const auto [lo, hi] = mesh.bounding_box();
  EXPECT_NEAR(lo.x(), 0.0, 1e-15);
  EXPECT_NEAR(lo.y(), 0.0, 1e-15);
  EXPECT_NEAR(hi.x(), 2 * s.a, 1e-15);
  EXPECT_NEAR(hi.y(), 2 * s.b, 1e-15);
}

TEST(LatticeTest, SolidUsesSeparateHeightRefinement) {
  LatticeSpec s = spec_of("SOLID", 2, 1);
  s.elements = 4;
  s.elements_y = 1;
  const MultiPatchMesh mesh = tessellate(s);
  EXPECT_EQ(mesh.patch(0).spec().xi.num_elements(), 4);
  EXPECT_EQ(mesh.patch(0).spec().eta.num_elements(), 1);
  EXPECT_NEAR(mesh.total_area(), 2 * s.a * s.b, 1e-24);
}

TEST(LatticeTest, InvalidSpecsAreRejected) {
  LatticeSpec s = spec_of("UC1");
  s.rho = 0.0;
  EXPECT_THROW(tessellate(s), Error);
  s.rho = 1.5;
  EXPECT_THROW(tessellate(s), Error);
  s = spec_of("UC1");
  s.degree = 1;
  EXPECT_THROW(tessellate(s), Error);
  s = spec_of("UC1");
  s.nx = 0;
  EXPECT_THROW(tessellate(s), Error);
}

TEST(LatticeTest, UnitCellMatchesSingleTessellation) {
  const LatticeSpec s = spec_of("UC4");
  EXPECT_EQ(build_unit_cell(s).size(), static_cast<std::size_t>(tessellate(s).num_patches()));
}
