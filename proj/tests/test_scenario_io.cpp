#include "flexoiga/error.hpp"
#include "flexoiga/scenario.hpp"

#include "vtk_reader.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace flexoiga;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "flexoiga_tests";
  fs::create_directories(dir);
  return dir / name;
}

// Small single-solve config for fast checks.
ScenarioConfig small_beam() {
  ScenarioConfig c = ScenarioConfig::builtin("two_patch_jump");
  c.set("sweep", "[]");
  return c;
}

}  // namespace

TEST(CsvTest, FormatsNumbersWithSeventeenDigits) {
  Table t;
  t.header = {"name", "value"};
  t.add_row({std::string("UC1"), 1.0});
  t.add_row({std::string("UC2"), -0.25});
  EXPECT_EQ(format_csv(t), "name,value\nUC1,1.00000000000000000e+00\nUC2,-2.50000000000000000e-01\n");
  EXPECT_EQ(t.column("value")[1], -0.25);
  EXPECT_EQ(t.text_column("name")[0], "UC1");
  EXPECT_THROW(t.column("name"), Error);
  EXPECT_THROW(t.column("missing"), Error);
  EXPECT_THROW(t.add_row({1.0}), Error);
}

TEST(ScenarioConfigTest, BuiltinsAreListedAndValid) {
  const auto names = builtin_scenarios();
  for (const std::string n : {"two_patch_jump", "convergence_2p", "convergence_4p", "kem_validation",
                              "closed_circuit_field", "uc_compression", "uc_compression_symmetric",
                              "lattice_bending", "converse_actuation", "kem_size_effect"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
    const ScenarioConfig c = ScenarioConfig::builtin(n);
    EXPECT_EQ(c.name(), n);
    EXPECT_NO_THROW(c.validate()) << n;
  }
  EXPECT_EQ(kind_of([] { ScenarioConfig::builtin("nope"); }), ErrorKind::ConfigError);
}

TEST(ScenarioConfigTest, OverridesAndValidation) {
  ScenarioConfig c = small_beam();
  c.set("dg.tau", "1e10");
  EXPECT_NE(c.text().find("10000000000"), std::string::npos);
  EXPECT_EQ(kind_of([&] { c.set("geometry.bogus", "1"); }), ErrorKind::ConfigError);
  for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"dg.tau", "-1"}, {"dg.beta", "0"}, {"geometry.rho", "1.5"}, {"geometry.rho", "0"},
           {"geometry.degree", "1"}, {"geometry.topology", "\"UC7\""}, {"material.E", "-5"},
           {"material.preset", "\"granite\""}, {"bc.mechanical", "\"twist\""}}) {
    ScenarioConfig bad = small_beam();
    bad.set(key, value);
    EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError) << key << "=" << value;
  }
  EXPECT_EQ(kind_of([] { ScenarioConfig::from_text("{not json"); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { ScenarioConfig::from_text(R"({"geometry": {"thickness": 1}})"); }), ErrorKind::ConfigError);
}

TEST(ScenarioConfigTest, SettingASweptKeyDropsTheSweep) {
  ScenarioConfig c = ScenarioConfig::builtin("two_patch_jump");
  c.set("dg.tau", "4e10");
  const ScenarioResult r = run_scenario(c);
  EXPECT_EQ(r.table.rows.size(), 1u);
  EXPECT_EQ(r.table.header.front(), "dofs");
}

TEST(ScenarioConfigTest, FileConfigWithBase) {
  const fs::path p = scratch("cfg.json");
  std::ofstream(p) << R"({"base": "two_patch_jump", "name": "mine", "sweep": [], "dg": {"tau": 1e6}})";
  const ScenarioConfig c = ScenarioConfig::from_file(p.string());
  EXPECT_EQ(c.name(), "mine");
  EXPECT_NE(c.text().find("1000000"), std::string::npos);
  std::ofstream(p) << R"({"sweep": []})";
  EXPECT_EQ(ScenarioConfig::from_file(p.string(), "converse_actuation").name(), "converse_actuation");
  EXPECT_EQ(kind_of([] { ScenarioConfig::from_file("/nonexistent/cfg.json"); }), ErrorKind::ConfigError);
}

TEST(ScenarioRunTest, SweepIsCartesianWithKeyColumns) {
  ScenarioConfig c = small_beam();
  c.set("sweep", R"([{"key": "dg.tau", "values": [0, 1e8]}, {"key": "geometry.elements", "values": [1, 2, 3]}])");
  const ScenarioResult r = run_scenario(c);
  ASSERT_EQ(r.table.rows.size(), 6u);
  EXPECT_EQ(r.table.header[0], "dg.tau");
  EXPECT_EQ(r.table.header[1], "geometry.elements");
  EXPECT_EQ(r.table.column("geometry.elements"), (std::vector<double>{1, 2, 3, 1, 2, 3}));
  EXPECT_EQ(r.table.column("dg.tau"), (std::vector<double>{0, 0, 0, 1e8, 1e8, 1e8}));
  const auto dofs = r.table.column("dofs");
  EXPECT_LT(dofs[0], dofs[1]);
  EXPECT_EQ(dofs[0], dofs[3]);
}

TEST(ScenarioRunTest, RerunIsByteIdentical) {
  const ScenarioConfig c = ScenarioConfig::builtin("two_patch_jump");
  EXPECT_EQ(format_csv(run_scenario(c).table), format_csv(run_scenario(c).table));
}

TEST(ScenarioRunTest, ClosedCircuitProfileSpansThickness) {
  const ScenarioResult r = run_scenario(ScenarioConfig::builtin("closed_circuit_field"));
  ASSERT_EQ(r.profile.rows.size(), 101u);
  const auto y = r.profile.column("y");
  const auto phi = r.profile.column("phi");
  EXPECT_NEAR(y.front(), 0.0, 1e-20);
  EXPECT_NEAR(y.back(), 1e-6, 1e-18);
  EXPECT_NEAR(phi.front(), 20.0, 1e-9);
  EXPECT_NEAR(phi.back(), 0.0, 1e-9);
}

TEST(VtkTest, UnitSquareAtSamplingTwo) {
  const MultiPatchMesh mesh({NurbsPatch::bilinear({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, 2, 1, 1)});
  SolutionField sol;
  sol.u = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  sol.phi = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const Vec2 x = mesh.node_positions()[n];
    sol.u(2 * n) = 0.1 * x.x();
    sol.phi(n) = 2.0 * x.y();
  }
  const fs::path p = scratch("square.vtk");
  write_vtk(sol, mesh, p.string(), 2);
  const VtkGrid g = read_vtk(p.string());
  EXPECT_EQ(g.points.size(), 9u);
  ASSERT_EQ(g.cells.size(), 4u);
  for (const auto& c : g.cells) EXPECT_EQ(c.size(), 4u);
  for (int t : g.cell_types) EXPECT_EQ(t, 9);
  EXPECT_EQ(g.components.at("u"), 3);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto& x = g.points[i];
    EXPECT_NEAR(g.point_data.at("u")[3 * i], 0.1 * x[0], 1e-15);
    EXPECT_EQ(g.point_data.at("u")[3 * i + 2], 0.0);
    EXPECT_NEAR(g.point_data.at("phi")[i], 2.0 * x[1], 1e-15);
    EXPECT_NEAR(g.point_data.at("eps11")[i], 0.1, 1e-14);
    EXPECT_NEAR(g.point_data.at("E2")[i], -2.0, 1e-14);
  }
  EXPECT_EQ(kind_of([&] { write_vtk(sol, mesh, "/nonexistent/dir/x.vtk"); }), ErrorKind::IoError);
}

TEST(VtkTest, ObserverSeesEverySolve) {
  ScenarioConfig c = ScenarioConfig::builtin("two_patch_jump");
  RunObserver obs;
  std::vector<std::string> labels;
  int points = 0;
  obs.on_solution = [&](const std::string& label, const MultiPatchMesh&, const SolutionField&) { labels.push_back(label); };
  obs.on_point = [&](const std::string&, double) { ++points; };
  run_scenario(c, obs);
  EXPECT_EQ(labels.size(), 6u);
  EXPECT_EQ(points, 6);
  EXPECT_EQ(labels.front(), "two_patch_jump_0");
}
