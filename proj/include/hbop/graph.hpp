#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hbop/geometry.hpp"
#include "hbop/image.hpp"
#include "hbop/skeleton.hpp"

namespace hbop {

struct GraphNode {
  Point pos;
  double attr = 0.0;         // centroid distance / max centroid distance
  std::string label;
};

struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;       // boundary mass of the branch / total boundary
  double angle = 0.0;        // chord vs principal axis, in [0, pi)
  std::vector<Point> pixel_chain;
};

/// Attributed skeletal graph. Nodes are skeleton end points and junction
/// clusters; edges are skeleton branches. May contain self loops and parallel
/// edges (they encode holes), so it is a multigraph.
struct SkeletalGraph {
  std::string shape_id;
  std::string class_label;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<int>> incident;  // node -> edge indices
  double principal_axis = 0.0;
  bool degenerate = false;  // single-node graph emitted for a point skeleton

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int connected_components() const;
  /// Independent cycles: E - V + C. Equals the mask's hole count.
  int cycle_rank() const;
  int find_node(const std::string& label) const;  // -1 if absent
};

SkeletalGraph build_graph(const Skeleton& skeleton, const ShapeImage& shape);

nlohmann::json graph_to_json(const SkeletalGraph& graph);
SkeletalGraph graph_from_json(const nlohmann::json& doc);
SkeletalGraph load_graph_json(const std::string& file_path);
void save_graph_json(const SkeletalGraph& graph, const std::string& file_path);

struct TreeNode {
  double x = 0.0;
  double y = 0.0;
  double attr = 0.0;
  std::string label;
  bool alive = true;
};

struct TreeEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
  double angle = 0.0;
  bool alive = true;
};

/// Maximum-weight spanning tree of a skeletal graph. Also the mutable
/// structure the path reductions evolve: contraction merges nodes and
/// redistributes weight, node removal absorbs side branches into the merged
/// edge. Dead slots keep ids stable across reductions.
struct SpanningTree {
  std::string shape_id;
  std::string class_label;
  std::vector<TreeNode> nodes;
  std::vector<TreeEdge> edges;
  std::vector<std::vector<int>> incident;  // alive edge ids per node
  double principal_axis = 0.0;

  int alive_node_count() const;
  int alive_edge_count() const;
  double total_weight() const;
  int degree(int v) const { return static_cast<int>(incident[v].size()); }
  int other_end(int e, int v) const;
  std::vector<int> neighbors(int v) const;  // ascending node ids
  int edge_between(int u, int v) const;     // -1 if none

  /// Weight of the subtree hanging at `root` when `blocked_edge` is cut.
  double subtree_weight(int root, int blocked_edge) const;

  /// Contract edge e: merge endpoints into min(u, v), redistribute the weight
  /// over surviving incident edges. Returns the merged node id; sets
  /// `mass_dropped` when no incident edge survives to take the weight.
  int contract_edge_in_tree(int e, bool& mass_dropped);

  /// Remove node vi together with its off-path subtrees, replacing path edges
  /// left_e/right_e with one merged edge (weight = sum + absorbed cost, angle
  /// recomputed from the surviving endpoints). Returns the new edge id.
  int absorb_node_in_tree(int vi, int left_e, int right_e, double absorbed_cost);

  double chord_angle(int u, int v) const;
};

SpanningTree max_spanning_tree(const SkeletalGraph& graph);

}  // namespace hbop
