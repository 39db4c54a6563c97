#include "hbop/paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hbop/errors.hpp"

namespace hbop {

namespace {

// Incident edges ordered by (neighbor id, edge id): deterministic DFS order.
std::vector<int> incident_sorted(const SpanningTree& tree, int v) {
  std::vector<int> out = tree.incident[v];
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    int oa = tree.other_end(a, v);
    int ob = tree.other_end(b, v);
    return oa != ob ? oa < ob : a < b;
  });
  return out;
}

}  // namespace

void refresh_path(const SpanningTree& tree, Path& path) {
  path.node_attrs.resize(path.node_ids.size());
  for (std::size_t k = 0; k < path.node_ids.size(); ++k)
    path.node_attrs[k] = tree.nodes[path.node_ids[k]].attr;
  path.edge_attrs.resize(path.edge_ids.size());
  for (std::size_t k = 0; k < path.edge_ids.size(); ++k) {
    const TreeEdge& e = tree.edges[path.edge_ids[k]];
    path.edge_attrs[k] = {e.weight, e.angle};
  }
}

Path make_path(const SpanningTree& tree, const std::vector<int>& node_ids) {
  if (node_ids.empty()) fail(ErrorCode::BadArgument, "path needs nodes");
  Path path;
  path.node_ids = node_ids;
  for (std::size_t k = 0; k + 1 < node_ids.size(); ++k) {
    int e = tree.edge_between(node_ids[k], node_ids[k + 1]);
    if (e < 0)
      fail(ErrorCode::BadArgument,
           "nodes " + std::to_string(node_ids[k]) + " and " +
               std::to_string(node_ids[k + 1]) + " are not adjacent in the tree");
    path.edge_ids.push_back(e);
  }
  refresh_path(tree, path);
  return path;
}

BagOfPaths enumerate_bag(const SpanningTree& tree, int s, int D,
                         std::string shape_id) {
  if (s < 1) fail(ErrorCode::BadArgument, "max path length must be >= 1");
  if (D < 0) fail(ErrorCode::BadArgument, "max reductions must be >= 0");

  BagOfPaths bag;
  bag.shape_id = shape_id.empty() ? tree.shape_id : std::move(shape_id);
  bag.max_path_length = s;
  bag.max_reductions = D;

  if (tree.alive_edge_count() == 0) {
    bag.empty_tree = true;
    return bag;
  }

  // Depth-first extension from every start node; each ordered simple path is
  // reached exactly once.
  std::vector<int> seq_nodes, seq_edges;
  std::vector<std::uint8_t> on_path(tree.nodes.size(), 0);

  auto emit = [&]() {
    Path path;
    path.node_ids = seq_nodes;
    path.edge_ids = seq_edges;
    refresh_path(tree, path);
    PathHierarchy h = build_hierarchy(tree, path, D);
    bag.hierarchies.push_back(std::move(h));
  };

  std::function<void(int)> extend = [&](int v) {
    if (static_cast<int>(seq_edges.size()) >= s) return;
    for (int e : incident_sorted(tree, v)) {
      int o = tree.other_end(e, v);
      if (on_path[o]) continue;
      seq_nodes.push_back(o);
      seq_edges.push_back(e);
      on_path[o] = 1;
      emit();
      extend(o);
      on_path[o] = 0;
      seq_nodes.pop_back();
      seq_edges.pop_back();
    }
  };

  for (std::size_t start = 0; start < tree.nodes.size(); ++start) {
    if (!tree.nodes[start].alive) continue;
    seq_nodes.assign(1, static_cast<int>(start));
    seq_edges.clear();
    on_path[start] = 1;
    extend(static_cast<int>(start));
    on_path[start] = 0;
  }
  return bag;
}

double node_removal_cost(const SpanningTree& tree, const Path& path,
                         std::size_t i) {
  if (i == 0 || i + 1 >= path.node_count())
    fail(ErrorCode::NotInterior,
         "node index " + std::to_string(i) + " is not interior");
  const int vi = path.node_ids[i];
  if (tree.degree(vi) < 3)
    fail(ErrorCode::DegreeTwoInTree,
         "path node " + std::to_string(vi) + " has tree degree " +
             std::to_string(tree.degree(vi)));

  const int left_e = path.edge_ids[i - 1];
  const int right_e = path.edge_ids[i];
  double cost = 0.0;
  for (int e : tree.incident[vi]) {
    if (e == left_e || e == right_e) continue;
    const int branch = tree.other_end(e, vi);
    cost += tree.subtree_weight(branch, e) + tree.edges[e].weight;
  }
  return cost;
}

Path remove_node(const SpanningTree& tree, const Path& path, std::size_t i,
                 double cost) {
  if (i == 0 || i + 1 >= path.node_count())
    fail(ErrorCode::NotInterior,
         "node index " + std::to_string(i) + " is not interior");

  Path out;
  out.node_ids = path.node_ids;
  out.node_ids.erase(out.node_ids.begin() + i);
  out.node_attrs = path.node_attrs;
  out.node_attrs.erase(out.node_attrs.begin() + i);

  EdgeAttr merged;
  merged.weight = path.edge_attrs[i - 1].weight + path.edge_attrs[i].weight + cost;
  merged.angle = tree.chord_angle(path.node_ids[i - 1], path.node_ids[i + 1]);

  out.edge_ids = path.edge_ids;
  out.edge_ids.erase(out.edge_ids.begin() + i);
  out.edge_ids[i - 1] = -1;  // merged edge has no tree id in the pure-path form
  out.edge_attrs = path.edge_attrs;
  out.edge_attrs.erase(out.edge_attrs.begin() + i);
  out.edge_attrs[i - 1] = merged;
  return out;
}

namespace {

// In-place reduction steps used by reduce_once / build_hierarchy. They keep
// the tree and the path consistent with each other.

void apply_node_removal(SpanningTree& tree, Path& path, std::size_t i,
                        double cost) {
  const int left_e = path.edge_ids[i - 1];
  const int right_e = path.edge_ids[i];
  const int merged_e = tree.absorb_node_in_tree(path.node_ids[i], left_e,
                                                right_e, cost);
  path.node_ids.erase(path.node_ids.begin() + i);
  path.edge_ids.erase(path.edge_ids.begin() + i);
  path.edge_ids[i - 1] = merged_e;
  refresh_path(tree, path);
}

bool apply_contraction(SpanningTree& tree, Path& path, std::size_t i) {
  bool mass_dropped = false;
  const int merged_v = tree.contract_edge_in_tree(path.edge_ids[i], mass_dropped);
  path.node_ids[i] = merged_v;
  path.node_ids.erase(path.node_ids.begin() + i + 1);
  path.edge_ids.erase(path.edge_ids.begin() + i);
  refresh_path(tree, path);
  return mass_dropped;
}

}  // namespace

std::pair<Path, SpanningTree> contract_edge(const SpanningTree& tree,
                                            const Path& path, std::size_t i) {
  if (i >= path.length())
    fail(ErrorCode::BadArgument, "edge index out of range");
  SpanningTree tree_copy = tree;
  Path path_copy = path;
  apply_contraction(tree_copy, path_copy, i);
  return {std::move(path_copy), std::move(tree_copy)};
}

std::vector<OpRecord> reduction_candidates(const SpanningTree& tree,
                                           const Path& path) {
  std::vector<OpRecord> candidates;
  for (std::size_t i = 1; i + 1 < path.node_count(); ++i) {
    if (tree.degree(path.node_ids[i]) < 3) continue;  // not a junction anymore
    candidates.push_back(
        {ReduceOp::NodeRemoval, i, node_removal_cost(tree, path, i), false});
  }
  for (std::size_t i = 0; i < path.length(); ++i)
    candidates.push_back({ReduceOp::EdgeContraction, i,
                          tree.edges[path.edge_ids[i]].weight, false});
  return candidates;
}

OpRecord reduce_once(SpanningTree& tree, Path& path) {
  if (path.length() == 0)
    fail(ErrorCode::Irreducible, "cannot reduce a single-node path");

  const std::vector<OpRecord> candidates = reduction_candidates(tree, path);
  const OpRecord* best = &candidates.front();
  for (const OpRecord& c : candidates) {
    if (c.cost < best->cost) best = &c;
    // ties: node removal wins, then the smaller index; candidate order
    // already lists removals before contractions and indices ascending
  }

  OpRecord applied = *best;
  if (applied.kind == ReduceOp::NodeRemoval) {
    apply_node_removal(tree, path, applied.index, applied.cost);
  } else {
    applied.mass_dropped = apply_contraction(tree, path, applied.index);
  }
  return applied;
}

PathHierarchy build_hierarchy(const SpanningTree& tree, const Path& root,
                              int D) {
  if (D < 0) fail(ErrorCode::BadArgument, "max reductions must be >= 0");
  PathHierarchy hierarchy;
  hierarchy.max_reductions = D;
  hierarchy.levels.push_back(root);

  SpanningTree working = tree;
  Path current = root;
  for (int k = 0; k < D && current.length() > 0; ++k) {
    OpRecord op = reduce_once(working, current);
    hierarchy.op_log.push_back(op);
    hierarchy.levels.push_back(current);
  }
  return hierarchy;
}

nlohmann::json hierarchy_to_json(const PathHierarchy& hierarchy) {
  nlohmann::json levels = nlohmann::json::array();
  for (const Path& level : hierarchy.levels) {
    nlohmann::json edges = nlohmann::json::array();
    for (const EdgeAttr& e : level.edge_attrs)
      edges.push_back({{"weight", e.weight}, {"angle", e.angle}});
    levels.push_back({{"node_ids", level.node_ids},
                      {"node_attrs", level.node_attrs},
                      {"edge_attrs", edges}});
  }
  nlohmann::json ops = nlohmann::json::array();
  for (const OpRecord& op : hierarchy.op_log) {
    nlohmann::json entry = {
        {"op", op.kind == ReduceOp::NodeRemoval ? "node_removal" : "edge_contraction"},
        {"index", op.index},
        {"cost", op.cost}};
    if (op.mass_dropped) entry["mass_dropped"] = true;
    ops.push_back(std::move(entry));
  }
  return {{"levels", std::move(levels)}, {"op_log", std::move(ops)},
          {"D", hierarchy.max_reductions}};
}

nlohmann::json bag_to_json(const BagOfPaths& bag) {
  nlohmann::json doc;
  doc["shape_id"] = bag.shape_id;
  doc["s"] = bag.max_path_length;
  doc["D"] = bag.max_reductions;
  doc["empty_tree"] = bag.empty_tree;
  doc["hierarchies"] = nlohmann::json::array();
  for (const PathHierarchy& h : bag.hierarchies)
    doc["hierarchies"].push_back(hierarchy_to_json(h));
  return doc;
}

}  // namespace hbop
