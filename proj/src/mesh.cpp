#include "flexoiga/mesh.hpp"

#include "flexoiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace flexoiga {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double edge_length(const NurbsPatch& patch, int edge) {
  const auto bp = patch.edge_knots(edge).breakpoints();
  const QuadratureRule rule = gauss_rule(patch.edge_knots(edge).degree() + 2);
  double len = 0.0;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double l = bp[e + 1] - bp[e];
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double s = bp[e] + 0.5 * (rule.points[g] + 1.0) * l;
      len += patch.edge_tangent(edge, s).norm() * rule.weights[g] * 0.5 * l;
    }
  }
  return len;
}

constexpr int kEdgeSamples = 7;

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

}  // namespace

MultiPatchMesh::MultiPatchMesh(std::vector<NurbsPatch> patches, double tol) : patches_(std::move(patches)) {
  require(!patches_.empty(), ErrorKind::InvalidArgument, "mesh needs at least one patch");
  if (tol > 0.0) {
    tol_ = tol;
  } else {
    const auto [lo, hi] = bounding_box();
    tol_ = 1e-9 * (hi - lo).norm();
  }
  merge_nodes();
  detect_interfaces();
}

std::pair<Vec2, Vec2> MultiPatchMesh::bounding_box() const {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& p : patches_) {
    for (const auto& c : p.control_points()) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
  }
  return {lo, hi};
}

void MultiPatchMesh::merge_nodes() {
  struct Candidate {
    int patch;
    int local;
    Vec2 x;
  };
  std::vector<Candidate> cand;
  std::vector<std::vector<int>> cand_id(patches_.size());
  for (int p = 0; p < num_patches(); ++p) {
    const NurbsPatch& patch = patches_[static_cast<std::size_t>(p)];
    cand_id[static_cast<std::size_t>(p)].assign(static_cast<std::size_t>(patch.num_control_points()), -1);
    for (int e = 0; e < 4; ++e) {
      for (int a : patch.edge_control_points(e)) {
        int& id = cand_id[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
        if (id >= 0) continue;
        id = static_cast<int>(cand.size());
        cand.push_back({p, a, patch.control_points()[static_cast<std::size_t>(a)]});
      }
    }
  }

  std::vector<int> order(cand.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return cand[a].x.x() < cand[b].x.x() || (cand[a].x.x() == cand[b].x.x() && a < b);
  });
  UnionFind uf(static_cast<int>(cand.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Candidate& a = cand[order[i]];
      const Candidate& b = cand[order[j]];
      if (b.x.x() - a.x.x() > tol_) break;
      if ((a.x - b.x).norm() <= tol_) uf.unite(order[i], order[j]);
    }
  }

  local_to_global_.assign(patches_.size(), {});
  std::vector<int> root_node(cand.size(), -1);
  num_nodes_ = 0;
  node_positions_.clear();
  for (int p = 0; p < num_patches(); ++p) {
    const NurbsPatch& patch = patches_[static_cast<std::size_t>(p)];
    auto& map = local_to_global_[static_cast<std::size_t>(p)];
    map.resize(static_cast<std::size_t>(patch.num_control_points()));
    for (int a = 0; a < patch.num_control_points(); ++a) {
      const int c = cand_id[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
      int id;
      if (c < 0) {
        id = num_nodes_++;
        node_positions_.push_back(patch.control_points()[static_cast<std::size_t>(a)]);
      } else {
        int& r = root_node[static_cast<std::size_t>(uf.find(c))];
        if (r < 0) {
          r = num_nodes_++;
          node_positions_.push_back(patch.control_points()[static_cast<std::size_t>(a)]);
        }
        id = r;
      }
      map[static_cast<std::size_t>(a)] = id;
    }
  }
}

void MultiPatchMesh::detect_interfaces() {
  interfaces_.clear();
  boundary_edges_.clear();

  auto edge_nodes = [&](EdgeRef e) {
    std::vector<int> ids = patch(e.patch).edge_control_points(e.edge);
    for (int& i : ids) i = node(e.patch, i);
    return ids;
  };
  auto sample = [&](EdgeRef e, double s) {
    const auto [xi, eta] = edge_parameter(e.edge, s);
    return patch(e.patch).map_point(xi, eta);
  };

  std::map<std::pair<int, int>, std::vector<EdgeRef>> by_ends;
  for (int p = 0; p < num_patches(); ++p) {
    for (int e = 0; e < 4; ++e) {
      const auto ids = edge_nodes({p, e});
      by_ends[{std::min(ids.front(), ids.back()), std::max(ids.front(), ids.back())}].push_back({p, e});
    }
  }

  std::vector<std::vector<bool>> matched(patches_.size(), std::vector<bool>(4, false));
  for (const auto& [ends, edges] : by_ends) {
    if (edges.size() < 2) continue;
    require(edges.size() == 2, ErrorKind::NonconformingInterface,
            "more than two patch edges share the same end nodes");
    const EdgeRef a = edges[0], b = edges[1];
    const auto na = edge_nodes(a);
    auto nb = edge_nodes(b);
    const bool reversed = na.front() != nb.front();
    if (reversed) std::reverse(nb.begin(), nb.end());
    require(na == nb, ErrorKind::NonconformingInterface,
            "edges of patches " + std::to_string(a.patch) + " and " + std::to_string(b.patch) +
                " share end points but not control points");
    std::vector<double> kb = patch(b.patch).edge_knots(b.edge).knots();
    if (reversed) {
      std::reverse(kb.begin(), kb.end());
      for (double& k : kb) k = 1.0 - k;
    }
    const auto& ka = patch(a.patch).edge_knots(a.edge).knots();
    bool same_knots = ka.size() == kb.size();
    for (std::size_t k = 0; same_knots && k < ka.size(); ++k) same_knots = std::abs(ka[k] - kb[k]) < 1e-12;
    require(same_knots, ErrorKind::NonconformingInterface,
            "edge knot vectors of patches " + std::to_string(a.patch) + " and " + std::to_string(b.patch) +
                " differ");
    for (int k = 0; k < kEdgeSamples; ++k) {
      const double s = static_cast<double>(k) / (kEdgeSamples - 1);
      const Vec2 xa = sample(a, s);
      const Vec2 xb = sample(b, reversed ? 1.0 - s : s);
      require((xa - xb).norm() <= tol_, ErrorKind::NonconformingInterface,
              "edge traces of patches " + std::to_string(a.patch) + " and " + std::to_string(b.patch) +
                  " do not coincide");
    }
    InterfaceEdge iface;
    iface.left = a;
    iface.right = b;
    iface.reversed = reversed;
    iface.length = edge_length(patch(a.patch), a.edge);
    iface.h = iface.length / patch(a.patch).edge_knots(a.edge).num_elements();
    interfaces_.push_back(iface);
    matched[static_cast<std::size_t>(a.patch)][static_cast<std::size_t>(a.edge)] = true;
    matched[static_cast<std::size_t>(b.patch)][static_cast<std::size_t>(b.edge)] = true;
  }
  std::sort(interfaces_.begin(), interfaces_.end(), [](const InterfaceEdge& x, const InterfaceEdge& y) {
    return std::tie(x.left.patch, x.left.edge) < std::tie(y.left.patch, y.left.edge);
  });

  for (int p = 0; p < num_patches(); ++p) {
    for (int e = 0; e < 4; ++e) {
      if (!matched[static_cast<std::size_t>(p)][static_cast<std::size_t>(e)]) boundary_edges_.push_back({p, e});
    }
  }

  // Unmatched edges that still overlap over a finite length are hanging interfaces.
  struct Trace {
    std::vector<Vec2> pts;
    Vec2 lo, hi;
  };
  std::vector<Trace> traces;
  for (const EdgeRef& e : boundary_edges_) {
    Trace t;
    for (int k = 0; k < kEdgeSamples; ++k) t.pts.push_back(sample(e, static_cast<double>(k) / (kEdgeSamples - 1)));
    t.lo = t.hi = t.pts.front();
    for (const auto& x : t.pts) {
      t.lo = t.lo.cwiseMin(x);
      t.hi = t.hi.cwiseMax(x);
    }
    traces.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (std::size_t j = 0; j < traces.size(); ++j) {
      if (i == j) continue;
      const Trace& A = traces[i];
      const Trace& B = traces[j];
      if ((A.lo.array() > B.hi.array() + tol_).any() || (B.lo.array() > A.hi.array() + tol_).any()) continue;
      int on = 0;
      for (int k = 1; k + 1 < kEdgeSamples; ++k) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m + 1 < B.pts.size(); ++m) {
          d = std::min(d, point_segment_distance(A.pts[static_cast<std::size_t>(k)], B.pts[m], B.pts[m + 1]));
        }
        if (d <= tol_) ++on;
      }
      require(on < 2, ErrorKind::NonconformingInterface,
              "patch " + std::to_string(boundary_edges_[i].patch) + " edge " +
                  std::to_string(boundary_edges_[i].edge) + " partially overlaps patch " +
                  std::to_string(boundary_edges_[j].patch));
    }
  }
}

std::vector<int> MultiPatchMesh::nodes_on_edges(const std::vector<EdgeRef>& edges) const {
  std::vector<int> out;
  for (const EdgeRef& e : edges) {
    for (int a : patch(e.patch).edge_control_points(e.edge)) out.push_back(node(e.patch, a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double MultiPatchMesh::total_area() const {
  double a = 0.0;
  for (const auto& p : patches_) a += p.area();
  return a;
}

std::vector<InterfaceEdge> detect_interfaces(const MultiPatchMesh& mesh) { return mesh.interfaces(); }

}  // namespace flexoiga
