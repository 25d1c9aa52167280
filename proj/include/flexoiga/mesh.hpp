#pragma once

#include "flexoiga/patch.hpp"

#include <vector>

namespace flexoiga {

struct EdgeRef {
  int patch = -1;
  int edge = -1;

  bool operator==(const EdgeRef&) const = default;
};

/// Shared edge between two patches. The right edge parameter equals s or 1-s
/// depending on `reversed`.
struct InterfaceEdge {
  EdgeRef left;
  EdgeRef right;
  bool reversed = false;
  /// Characteristic element size: edge length over its number of spans.
  double h = 0.0;
  double length = 0.0;

  double right_parameter(double s) const { return reversed ? 1.0 - s : s; }
};

/// Patches glued by geometric coincidence of boundary control points.
class MultiPatchMesh {
 public:
  MultiPatchMesh() = default;
  /// Merges coincident boundary control points and detects interfaces. tol <= 0
  /// selects 1e-9 times the bounding-box diagonal.
  explicit MultiPatchMesh(std::vector<NurbsPatch> patches, double tol = 0.0);

  const std::vector<NurbsPatch>& patches() const { return patches_; }
  const NurbsPatch& patch(int p) const { return patches_[static_cast<std::size_t>(p)]; }
  int num_patches() const { return static_cast<int>(patches_.size()); }

  int num_nodes() const { return num_nodes_; }
  /// Global node of local control point a in patch p.
  int node(int p, int a) const { return local_to_global_[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)]; }
  const std::vector<int>& patch_nodes(int p) const { return local_to_global_[static_cast<std::size_t>(p)]; }
  const std::vector<Vec2>& node_positions() const { return node_positions_; }

  /// Degrees of freedom: u_c of node n at 2n+c, phi of node n at 2N+n.
  int num_dofs() const { return 3 * num_nodes_; }
  int u_dof(int node, int comp) const { return 2 * node + comp; }
  int phi_dof(int node) const { return 2 * num_nodes_ + node; }

  const std::vector<InterfaceEdge>& interfaces() const { return interfaces_; }
  /// Patch edges not matched by any interface.
  const std::vector<EdgeRef>& boundary_edges() const { return boundary_edges_; }

  double tolerance() const { return tol_; }
  /// (min, max) corners of the control-point bounding box.
  std::pair<Vec2, Vec2> bounding_box() const;

  /// Boundary edges whose sampled points all satisfy the predicate.
  template <class Pred>
  std::vector<EdgeRef> select_boundary_edges(Pred&& pred) const {
    std::vector<EdgeRef> out;
    for (const EdgeRef& e : boundary_edges_) {
      bool all = true;
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto [xi, eta] = edge_parameter(e.edge, s);
        if (!pred(patch(e.patch).map_point(xi, eta))) {
          all = false;
          break;
        }
      }
      if (all) out.push_back(e);
    }
    return out;
  }

  /// Global nodes on the given edges, sorted and unique.
  std::vector<int> nodes_on_edges(const std::vector<EdgeRef>& edges) const;

  double total_area() const;

 private:
  void merge_nodes();
  void detect_interfaces();

  std::vector<NurbsPatch> patches_;
  std::vector<std::vector<int>> local_to_global_;
  std::vector<Vec2> node_positions_;
  std::vector<InterfaceEdge> interfaces_;
  std::vector<EdgeRef> boundary_edges_;
  int num_nodes_ = 0;
  double tol_ = 0.0;
};

/// Interfaces between the given patches, as stored on a mesh built from them.
std::vector<InterfaceEdge> detect_interfaces(const MultiPatchMesh& mesh);

}  // namespace flexoiga
