#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hbop/graph.hpp"

namespace hbop {

struct EdgeAttr {
  double weight = 0.0;
  double angle = 0.0;
};

/// A path snapshot: node ids into the owning tree plus frozen attribute
/// sequences. `edge_ids` track the underlying tree edges so reductions can
/// refresh attributes after the tree changes.
struct Path {
  std::vector<int> node_ids;
  std::vector<int> edge_ids;
  std::vector<double> node_attrs;
  std::vector<EdgeAttr> edge_attrs;

  std::size_t length() const { return edge_attrs.size(); }  // edge count
  std::size_t node_count() const { return node_ids.size(); }
};

enum class ReduceOp { NodeRemoval, EdgeContraction };

struct OpRecord {
  ReduceOp kind = ReduceOp::EdgeContraction;
  std::size_t index = 0;  // path position: node index or edge index
  double cost = 0.0;
  bool mass_dropped = false;  // contraction had no surviving incident edge
};

/// A path with its successive reductions. levels[k] is the path after k
/// applications of the cheapest-operation rule; op_log[k] produced
/// levels[k+1].
struct PathHierarchy {
  std::vector<Path> levels;
  std::vector<OpRecord> op_log;
  int max_reductions = 0;  // the D this hierarchy was built with

  const Path& root() const { return levels.front(); }
  std::size_t level_count() const { return levels.size(); }
};

struct BagOfPaths {
  std::string shape_id;
  int max_path_length = 0;  // s
  int max_reductions = 0;   // D
  std::vector<PathHierarchy> hierarchies;
  bool empty_tree = false;

  std::size_t size() const { return hierarchies.size(); }
};

/// Rebuild a path's attribute snapshots from the current tree state.
void refresh_path(const SpanningTree& tree, Path& path);

/// Make the length-(k) path along the given tree nodes (must be pairwise
/// adjacent in the tree). Convenience for tests and the demo tool.
Path make_path(const SpanningTree& tree, const std::vector<int>& node_ids);

/// All simple paths of 1..s edges over the spanning tree, both orientations,
/// each with its reduction hierarchy precomputed against a private tree copy.
BagOfPaths enumerate_bag(const SpanningTree& tree, int s, int D,
                         std::string shape_id = {});

/// Cost of removing interior node i (0-based) from the path: total weight of
/// the off-path branches hanging at that node, each counted as subtree weight
/// plus connecting edge weight.
double node_removal_cost(const SpanningTree& tree, const Path& path,
                         std::size_t i);

/// Path-level node removal: drops node i and concatenates its two incident
/// path edges into one of weight w_left + w_right + cost, angle recomputed
/// from the surviving endpoints against the principal axis.
Path remove_node(const SpanningTree& tree, const Path& path, std::size_t i,
                 double cost);

/// Edge contraction on a tree copy: endpoints merge (midpoint position, mean
/// attribute) and the contracted weight spreads equally over the surviving
/// incident edges.
std::pair<Path, SpanningTree> contract_edge(const SpanningTree& tree,
                                            const Path& path, std::size_t i);

/// All admissible operations on the path with their costs, in candidate order
/// (node removals by index, then contractions by index).
std::vector<OpRecord> reduction_candidates(const SpanningTree& tree,
                                           const Path& path);

/// Apply the cheapest admissible operation in place. Ties prefer node removal,
/// then the smallest index. Throws Irreducible on a single-node path.
OpRecord reduce_once(SpanningTree& tree, Path& path);

/// (h, kappa(h), ..., kappa^D(h)); stops early once the path is a single
/// node. Reductions accumulate on a private copy of the tree.
PathHierarchy build_hierarchy(const SpanningTree& tree, const Path& root,
                              int D);

nlohmann::json hierarchy_to_json(const PathHierarchy& hierarchy);
nlohmann::json bag_to_json(const BagOfPaths& bag);

}  // namespace hbop
