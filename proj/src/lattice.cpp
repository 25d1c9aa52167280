#include "flexoiga/lattice.hpp"

#include "flexoiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace flexoiga {

void LatticeSpec::validate() const {
  require(a > 0.0 && b > 0.0, ErrorKind::InvalidArgument, "cell dimensions must be positive");
  require(rho > 0.0 && rho <= 1.0, ErrorKind::InvalidArgument, "relative density must lie in (0, 1]");
  require(nx >= 1 && ny >= 1, ErrorKind::InvalidArgument, "tessellation counts must be >= 1");
  require(degree >= 2, ErrorKind::InvalidArgument, "basis degree must be >= 2");
  require(elements >= 1, ErrorKind::InvalidArgument, "elements per patch must be >= 1");
  require(elements_y >= 0, ErrorKind::InvalidArgument, "elements across the height must be >= 0");
}

std::vector<Segment> topology_struts(const std::string& name) {
  const Vec2 p00(0, 0), p10(1, 0), p11(1, 1), p01(0, 1);
  if (name == "UC1") return {{p00, p11}, {p10, p01}};
  if (name == "UC2") return {{p00, p01}, {p10, p11}, {p00, p11}};
  if (name == "UC3") return {{p00, p10}, {p10, p11}, {p11, p01}, {p01, p00}};
  if (name == "UC4") return {{p00, p01}, {p10, p11}, {Vec2(0, 0.5), Vec2(1, 0.5)}};
  if (name == "SOLID") return {};
  fail(ErrorKind::ConfigError, "unknown lattice topology '" + name + "'");
}

std::vector<Segment> LatticeSpec::cell_struts() const {
  if (!struts.empty()) return struts;
  return topology_struts(topology);
}

double quad_area(const Quad& q) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2& p = q[static_cast<std::size_t>(i)];
    const Vec2& r = q[static_cast<std::size_t>((i + 1) % 4)];
    s += p.x() * r.y() - r.x() * p.y();
  }
  return 0.5 * s;
}

namespace {

Vec2 left_normal(const Vec2& d) { return {-d.y(), d.x()}; }
double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

struct Graph {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 2>> edges;
};

int find_or_add(std::vector<Vec2>& nodes, const Vec2& x, double tol) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if ((nodes[i] - x).norm() <= tol) return static_cast<int>(i);
  }
  nodes.push_back(x);
  return static_cast<int>(nodes.size()) - 1;
}

Graph build_graph(const LatticeSpec& spec, int nx, int ny, double tol) {
  std::vector<Segment> segs;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      for (const Segment& s : spec.cell_struts()) {
        auto place = [&](const Vec2& p) { return Vec2((i + p.x()) * spec.a, (j + p.y()) * spec.b); };
        segs.push_back({place(s[0]), place(s[1])});
      }
    }
  }
  // Split every segment at crossings, T-junctions and collinear overlaps.
  std::vector<std::vector<double>> cuts(segs.size(), std::vector<double>{0.0, 1.0});
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Vec2 p = segs[i][0], r = segs[i][1] - segs[i][0];
    require(r.norm() > tol, ErrorKind::InvalidArgument, "zero-length strut in topology");
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (i == j) continue;
      const Vec2 q = segs[j][0], s = segs[j][1] - segs[j][0];
      const double rxs = cross(r, s);
      const double eps_t = tol / r.norm();
      if (std::abs(rxs) > 1e-12 * r.norm() * s.norm()) {
        const double t = cross(q - p, s) / rxs;
        const double u = cross(q - p, r) / rxs;
        const double eps_u = tol / s.norm();
        if (t > -eps_t && t < 1 + eps_t && u > -eps_u && u < 1 + eps_u) cuts[i].push_back(std::clamp(t, 0.0, 1.0));
      } else if (std::abs(cross(q - p, r)) <= tol * r.norm()) {
        for (const Vec2& e : segs[j]) {
          const double t = (e - p).dot(r) / r.squaredNorm();
          if (t > eps_t && t < 1 - eps_t) cuts[i].push_back(t);
        }
      }
    }
  }
  Graph g;
  std::map<std::pair<int, int>, bool> seen;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    auto& c = cuts[i];
    std::sort(c.begin(), c.end());
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      const Vec2 x0 = segs[i][0] + c[k] * (segs[i][1] - segs[i][0]);
      const Vec2 x1 = segs[i][0] + c[k + 1] * (segs[i][1] - segs[i][0]);
      if ((x1 - x0).norm() <= tol) continue;
      const int n0 = find_or_add(g.nodes, x0, tol);
      const int n1 = find_or_add(g.nodes, x1, tol);
      if (n0 == n1) continue;
      const auto key = std::minmax(n0, n1);
      if (seen.emplace(key, true).second) g.edges.push_back({n0, n1});
    }
  }
  // Merge straight-through nodes of degree two.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<int>> inc(g.nodes.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      for (int n : g.edges[e]) inc[static_cast<std::size_t>(n)].push_back(static_cast<int>(e));
    }
    for (std::size_t n = 0; n < g.nodes.size() && !changed; ++n) {
      if (inc[n].size() != 2) continue;
      auto other = [&](int e) {
        const auto& ed = g.edges[static_cast<std::size_t>(e)];
        return ed[0] == static_cast<int>(n) ? ed[1] : ed[0];
      };
      const int a = other(inc[n][0]), c = other(inc[n][1]);
      const Vec2 da = (g.nodes[static_cast<std::size_t>(a)] - g.nodes[n]).normalized();
      const Vec2 dc = (g.nodes[static_cast<std::size_t>(c)] - g.nodes[n]).normalized();
      if (da.dot(dc) > -1.0 + 1e-12) continue;
      g.edges[static_cast<std::size_t>(inc[n][0])] = {a, c};
      g.edges.erase(g.edges.begin() + inc[n][1]);
      changed = true;
    }
  }
  // Drop isolated nodes and renumber in first-use order.
  std::vector<int> remap(g.nodes.size(), -1);
  Graph out;
  for (auto& e : g.edges) {
    for (int& n : e) {
      if (remap[static_cast<std::size_t>(n)] < 0) {
        remap[static_cast<std::size_t>(n)] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(g.nodes[static_cast<std::size_t>(n)]);
      }
      n = remap[static_cast<std::size_t>(n)];
    }
    out.edges.push_back(e);
  }
  return out;
}

struct Box {
  double W, H, tol;
  bool inside(const Vec2& x) const {
    return x.x() >= -tol && x.x() <= W + tol && x.y() >= -tol && x.y() <= H + tol;
  }
  bool strictly_inside(const Vec2& x) const {
    return x.x() > tol && x.x() < W - tol && x.y() > tol && x.y() < H - tol;
  }
  /// Bitmask of box sides the point lies on: 1 bottom, 2 right, 4 top, 8 left.
  int sides(const Vec2& x) const {
    int m = 0;
    if (std::abs(x.y()) <= tol) m |= 1;
    if (std::abs(x.x() - W) <= tol) m |= 2;
    if (std::abs(x.y() - H) <= tol) m |= 4;
    if (std::abs(x.x()) <= tol) m |= 8;
    return m;
  }
};

struct Arm {
  Vec2 d;
  double angle;
  double off_left;
  double off_right;
  int edge;  // -1 for a bare wall
  double setback = 0.0;
};

std::vector<Quad> build_quads(const Graph& g, const Box& box, double w) {
  const double half = 0.5 * w;
  std::vector<std::vector<Arm>> arms(g.nodes.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [n0, n1] = g.edges[e];
    const Vec2 x0 = g.nodes[static_cast<std::size_t>(n0)], x1 = g.nodes[static_cast<std::size_t>(n1)];
    const bool wall = (box.sides(x0) & box.sides(x1)) != 0;
    for (int end = 0; end < 2; ++end) {
      const Vec2 c = end == 0 ? x0 : x1;
      const Vec2 d = ((end == 0 ? x1 : x0) - c).normalized();
      const Vec2 l = left_normal(d);
      const Vec2 mid = 0.5 * (x0 + x1);
      double ol = half, orr = half;
      if (wall) {
        ol = box.strictly_inside(mid + 1e-3 * w * l) ? half : 0.0;
        orr = box.strictly_inside(mid - 1e-3 * w * l) ? half : 0.0;
      }
      arms[static_cast<std::size_t>(end == 0 ? n0 : n1)].push_back(
          {d, std::atan2(d.y(), d.x()), ol, orr, static_cast<int>(e)});
    }
  }
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const Vec2 c = g.nodes[n];
    const int sides = box.sides(c);
    const std::array<Vec2, 4> dirs{Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)};
    for (const Vec2& d : dirs) {
      const bool along = ((sides & (1 | 4)) && d.y() == 0.0) || ((sides & (2 | 8)) && d.x() == 0.0);
      if (!along || !box.inside(c + 1e-3 * w * d)) continue;
      const bool taken = std::any_of(arms[n].begin(), arms[n].end(), [&](const Arm& a) { return a.d.dot(d) > 1 - 1e-9; });
      if (!taken) arms[n].push_back({d, std::atan2(d.y(), d.x()), 0.0, 0.0, -1});
    }
    std::sort(arms[n].begin(), arms[n].end(), [](const Arm& x, const Arm& y) { return x.angle < y.angle; });
  }

  struct Gap {
    bool interior = false;
    Vec2 P = Vec2::Zero();
  };
  std::vector<std::vector<Gap>> gaps(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    auto& A = arms[n];
    const Vec2 c = g.nodes[n];
    const std::size_t m = A.size();
    gaps[n].resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const Arm& a0 = A[k];
      const Arm& a1 = A[(k + 1) % m];
      double theta = a1.angle - a0.angle;
      if (theta <= 1e-12) theta += 2.0 * std::numbers::pi;
      const Eigen::Rotation2Dd rot(0.5 * theta);
      const Vec2 bis = rot * a0.d;
      if (!box.inside(c + 1e-3 * w * bis)) continue;
      require(theta < std::numbers::pi + 1e-9, ErrorKind::InvalidArgument,
              "unsupported joint: reflex gap at lattice node (" + std::to_string(c.x()) + ", " +
                  std::to_string(c.y()) + ")");
      Gap& gp = gaps[n][k];
      gp.interior = true;
      const Vec2 l0 = left_normal(a0.d), l1 = left_normal(a1.d);
      const Vec2 q0 = c + a0.off_left * l0;
      const Vec2 q1 = c - a1.off_right * l1;
      const double den = cross(a0.d, a1.d);
      if (std::abs(den) < 1e-9) {
        require(std::abs(a0.off_left - a1.off_right) <= 1e-12 * w, ErrorKind::InvalidArgument,
                "unsupported joint: collinear arms of different width");
        gp.P = q0;
      } else {
        const double s = cross(q1 - q0, a1.d) / den;
        gp.P = q0 + s * a0.d;
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (A[k].edge < 0) continue;
      double t = 0.0;
      const Gap& after = gaps[n][k];
      const Gap& before = gaps[n][(k + m - 1) % m];
      if (after.interior) t = std::max(t, A[k].d.dot(after.P - c));
      if (before.interior) t = std::max(t, A[k].d.dot(before.P - c));
      A[k].setback = t + half;
    }
  }

  auto setback = [&](int node, int edge) {
    for (const Arm& a : arms[static_cast<std::size_t>(node)]) {
      if (a.edge == edge) return a;
    }
    fail(ErrorKind::InvalidArgument, "lattice graph inconsistency");
  };

  std::vector<Quad> quads;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [n0, n1] = g.edges[e];
    const Arm a0 = setback(n0, static_cast<int>(e));
    const Arm a1 = setback(n1, static_cast<int>(e));
    const Vec2 x0 = g.nodes[static_cast<std::size_t>(n0)], x1 = g.nodes[static_cast<std::size_t>(n1)];
    const double len = (x1 - x0).norm();
    require(len - a0.setback - a1.setback > 0.1 * w, ErrorKind::InvalidArgument,
            "relative density infeasible: struts too short for width " + std::to_string(w));
    const Vec2 d = a0.d, l = left_normal(d);
    const Vec2 M0 = x0 + a0.setback * d, M1 = x1 - a1.setback * d;
    if (a0.off_left > 0.0) quads.push_back({M0, M1, M1 + a0.off_left * l, M0 + a0.off_left * l});
    if (a0.off_right > 0.0) quads.push_back({M0 - a0.off_right * l, M1 - a0.off_right * l, M1, M0});
  }
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const auto& A = arms[n];
    const Vec2 c = g.nodes[n];
    const std::size_t m = A.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Gap& gp = gaps[n][k];
      if (!gp.interior) continue;
      const Arm& a0 = A[k];
      const Arm& a1 = A[(k + 1) % m];
      if (a0.edge >= 0 && a0.off_left > 0.0) {
        const Vec2 M = c + a0.setback * a0.d;
        quads.push_back({c, M, M + a0.off_left * left_normal(a0.d), gp.P});
      }
      if (a1.edge >= 0 && a1.off_right > 0.0) {
        const Vec2 M = c + a1.setback * a1.d;
        quads.push_back({c, gp.P, M - a1.off_right * left_normal(a1.d), M});
      }
    }
  }
  for (const Quad& q : quads) {
    require(quad_area(q) > 0.0, ErrorKind::InvalidArgument, "unsupported joint: inverted joint quad");
  }
  return quads;
}

std::vector<Quad> quads_for(const LatticeSpec& spec, int nx, int ny, double width) {
  const double W = spec.a * nx, H = spec.b * ny;
  const double tol = 1e-9 * std::hypot(W, H);
  if (spec.solid()) {
    std::vector<Quad> quads;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double x0 = i * spec.a, y0 = j * spec.b;
        quads.push_back({Vec2(x0, y0), Vec2(x0 + spec.a, y0), Vec2(x0 + spec.a, y0 + spec.b), Vec2(x0, y0 + spec.b)});
      }
    }
    return quads;
  }
  require(width > 0.0, ErrorKind::InvalidArgument, "strut width must be positive");
  const Graph g = build_graph(spec, nx, ny, tol);
  return build_quads(g, Box{W, H, tol}, width);
}

}  // namespace

std::array<NurbsPatch, 2> build_strut(const Vec2& p0, const Vec2& p1, double w0, double w1, int degree,
                                      int elements) {
  const double len = (p1 - p0).norm();
  require(w0 > 0.0 && w1 > 0.0 && len > std::max(w0, w1), ErrorKind::DegenerateGeometry,
          "degenerate strut: length must exceed its width");
  const Vec2 d = (p1 - p0) / len, l = left_normal(d);
  const Quad left{p0, p1, p1 + 0.5 * w1 * l, p0 + 0.5 * w0 * l};
  const Quad right{p0 - 0.5 * w0 * l, p1 - 0.5 * w1 * l, p1, p0};
  return {NurbsPatch::bilinear(left, degree, elements, elements),
          NurbsPatch::bilinear(right, degree, elements, elements)};
}

std::vector<Quad> lattice_quads(const LatticeSpec& spec, double width) {
  spec.validate();
  return quads_for(spec, spec.nx, spec.ny, width);
}

double solve_strut_width(const LatticeSpec& spec) {
  spec.validate();
  if (spec.solid()) return 0.0;
  const double target = spec.rho * spec.a * spec.b;
  auto area = [&](double w) {
    double s = 0.0;
    for (const Quad& q : quads_for(spec, 1, 1, w)) s += quad_area(q);
    return s;
  };
  auto feasible = [&](double w) {
    try {
      area(w);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  double hi = std::min(spec.a, spec.b);
  while (!feasible(hi)) {
    hi *= 0.9;
    require(hi > 1e-6 * std::min(spec.a, spec.b), ErrorKind::InvalidArgument, "no feasible strut width");
  }
  require(area(hi) >= target, ErrorKind::InvalidArgument,
          "relative density " + std::to_string(spec.rho) + " infeasible for topology " + spec.topology);
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * spec.a; ++it) {
    const double mid = 0.5 * (lo + hi);
    (area(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

NurbsPatch quad_patch(const LatticeSpec& spec, const Quad& q) {
  const int ey = spec.solid() && spec.elements_y > 0 ? spec.elements_y : spec.elements;
  return NurbsPatch::bilinear(q, spec.degree, spec.elements, ey);
}

}  // namespace

std::vector<NurbsPatch> build_unit_cell(const LatticeSpec& spec) {
  LatticeSpec one = spec;
  one.nx = one.ny = 1;
  std::vector<NurbsPatch> patches;
  for (const Quad& q : lattice_quads(one, solve_strut_width(one))) {
    patches.push_back(quad_patch(spec, q));
  }
  return patches;
}

MultiPatchMesh tessellate(const LatticeSpec& spec) {
  const double w = solve_strut_width(spec);
  std::vector<NurbsPatch> patches;
  for (const Quad& q : lattice_quads(spec, w)) {
    patches.push_back(quad_patch(spec, q));
  }
  return MultiPatchMesh(std::move(patches));
}

}  // namespace flexoiga
