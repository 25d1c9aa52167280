#pragma once

#include "flexoiga/mesh.hpp"

#include <array>
#include <string>
#include <vector>

namespace flexoiga {

using Segment = std::array<Vec2, 2>;
using Quad = std::array<Vec2, 4>;

/// Truss lattice description. Struts are given in cell coordinates [0,1]^2;
/// when empty the named topology supplies them.
struct LatticeSpec {
  std::string topology = "UC1";
  double a = 1e-6;
  double b = 1e-6;
  double rho = 0.2;
  int nx = 1;
  int ny = 1;
  int degree = 3;
  int elements = 1;
  /// Elements across the height of SOLID patches; 0 means the same as elements.
  int elements_y = 0;
  std::vector<Segment> struts;

  void validate() const;
  /// Struts of the topology in cell coordinates (empty for SOLID).
  std::vector<Segment> cell_struts() const;
  bool solid() const { return topology == "SOLID"; }
};

/// Built-in topologies: UC1 X-braced, UC2 N-braced, UC3 square frame, UC4
/// H-frame. SOLID has no struts.
std::vector<Segment> topology_struts(const std::string& name);

/// Two half-width quads of a straight strut, split along its centerline.
/// Left half first (relative to p0 -> p1).
std::array<NurbsPatch, 2> build_strut(const Vec2& p0, const Vec2& p1, double w0, double w1, int degree = 3,
                                      int elements = 1);

/// Quads of the lattice region: strut halves plus joint fans. Throws
/// invalid-argument when the width does not fit the topology.
std::vector<Quad> lattice_quads(const LatticeSpec& spec, double width);

/// Strut width giving fill fraction rho on a single cell.
double solve_strut_width(const LatticeSpec& spec);

/// Polygon area by the shoelace formula (counter-clockwise positive).
double quad_area(const Quad& q);

/// Patches of one cell.
std::vector<NurbsPatch> build_unit_cell(const LatticeSpec& spec);

/// nx x ny tessellation with merged nodes and detected interfaces.
MultiPatchMesh tessellate(const LatticeSpec& spec);

}  // namespace flexoiga
