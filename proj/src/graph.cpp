#include "hbop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "hbop/errors.hpp"

namespace hbop {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

int SkeletalGraph::connected_components() const {
  if (nodes.empty()) return 0;
  UnionFind uf(node_count());
  for (const auto& e : edges) uf.unite(e.u, e.v);
  std::set<int> roots;
  for (int v = 0; v < node_count(); ++v) roots.insert(uf.find(v));
  return static_cast<int>(roots.size());
}

int SkeletalGraph::cycle_rank() const {
  return edge_count() - node_count() + connected_components();
}

int SkeletalGraph::find_node(const std::string& label) const {
  for (int v = 0; v < node_count(); ++v)
    if (nodes[v].label == label) return v;
  return -1;
}

namespace {

// Degree under the minimal skeleton adjacency.
int skeleton_degree(const Skeleton& skel, const Point& p) {
  return static_cast<int>(skeleton_neighbors(skel, p).size());
}

}  // namespace

SkeletalGraph build_graph(const Skeleton& skel, const ShapeImage& shape) {
  SkeletalGraph graph;
  graph.shape_id = shape.id;
  graph.class_label = shape.class_label;

  const MaskStats stats = compute_mask_stats(shape);
  graph.principal_axis = stats.principal_axis;
  const double max_dist = std::max(stats.max_centroid_dist, 1e-12);

  const std::vector<Point> pixels = skel.pixel_list();
  if (pixels.empty())
    fail(ErrorCode::EmptyMask, "empty skeleton for " + shape.id);

  // Classify pixels: end (deg <= 1), interior (deg 2), junction (deg >= 3).
  std::map<std::pair<int, int>, int> degree_of;
  std::vector<Point> node_pixels;
  for (const Point& p : pixels) {
    int d = skeleton_degree(skel, p);
    degree_of[{p.y, p.x}] = d;
    if (d != 2) node_pixels.push_back(p);
  }

  // A pure cycle has no end or junction pixels; seed one node so the loop
  // becomes a self-loop edge.
  if (node_pixels.empty()) node_pixels.push_back(pixels.front());

  // Cluster mutually adjacent junction pixels into one node. End pixels stay
  // their own cluster even when adjacent to a junction.
  std::map<std::pair<int, int>, int> cluster_of;
  std::vector<std::vector<Point>> clusters;
  for (const Point& p : node_pixels) {
    if (cluster_of.count({p.y, p.x})) continue;
    int cid = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::vector<Point> stack{p};
    cluster_of[{p.y, p.x}] = cid;
    while (!stack.empty()) {
      Point q = stack.back();
      stack.pop_back();
      clusters[cid].push_back(q);
      if (degree_of[{q.y, q.x}] < 3) continue;  // only junctions spread
      for (const Point& r : skeleton_neighbors(skel, q)) {
        if (degree_of[{r.y, r.x}] < 3) continue;
        if (cluster_of.count({r.y, r.x})) continue;
        cluster_of[{r.y, r.x}] = cid;
        stack.push_back(r);
      }
    }
    std::sort(clusters[cid].begin(), clusters[cid].end(), scanline_less);
  }

  // Node position: cluster member nearest the cluster centroid.
  for (const auto& members : clusters) {
    double cx = 0.0, cy = 0.0;
    for (const Point& m : members) {
      cx += m.x;
      cy += m.y;
    }
    cx /= members.size();
    cy /= members.size();
    Point best = members.front();
    double best_d = 1e300;
    for (const Point& m : members) {
      double d = (m.x - cx) * (m.x - cx) + (m.y - cy) * (m.y - cy);
      if (d < best_d - 1e-12) {
        best_d = d;
        best = m;
      }
    }
    GraphNode node;
    node.pos = best;
    const double dx = best.x - stats.centroid_x;
    const double dy = best.y - stats.centroid_y;
    node.attr = std::sqrt(dx * dx + dy * dy) / max_dist;
    node.label = std::to_string(graph.nodes.size());
    graph.nodes.push_back(std::move(node));
  }

  auto node_at = [&](const Point& p) -> int {
    auto it = cluster_of.find({p.y, p.x});
    return it == cluster_of.end() ? -1 : it->second;
  };

  if (graph.node_count() == 1 && pixels.size() == 1) {
    graph.degenerate = true;
    graph.incident.resize(1);
    return graph;
  }

  // Trace branches. Interior pixels are consumed once; direct node-to-node
  // contacts between different clusters are emitted from the scanline-smaller
  // pixel only.
  std::set<std::pair<int, int>> used_interior;
  struct RawEdge {
    int u, v;
    std::vector<Point> chain;
    double interior_mass = 0.0;
  };
  std::vector<RawEdge> raw_edges;

  for (int cid = 0; cid < static_cast<int>(clusters.size()); ++cid) {
    for (const Point& p : clusters[cid]) {
      for (const Point& q : skeleton_neighbors(skel, p)) {
        int qnode = node_at(q);
        if (qnode >= 0) {
          if (qnode == cid) continue;  // same cluster (or loop seed contact)
          if (!scanline_less(p, q)) continue;
          raw_edges.push_back({cid, qnode, {p, q}, 0.0});
          continue;
        }
        // q interior: walk the branch.
        if (used_interior.count({q.y, q.x})) continue;
        RawEdge edge;
        edge.u = cid;
        edge.chain.push_back(p);
        Point prev = p, cur = q;
        for (;;) {
          edge.chain.push_back(cur);
          used_interior.insert({cur.y, cur.x});
          edge.interior_mass += skel.boundary_contribution[skel.index(cur.x, cur.y)];
          std::vector<Point> around = skeleton_neighbors(skel, cur);
          Point next{-1, -1};
          for (const Point& r : around)
            if (!(r == prev)) {
              next = r;
              break;
            }
          if (next.x < 0) {  // dead end inside a branch; treat tip as end node
            edge.v = -1;
            break;
          }
          int nnode = node_at(next);
          if (nnode >= 0) {
            edge.chain.push_back(next);
            edge.v = nnode;
            break;
          }
          if (used_interior.count({next.y, next.x})) {  // closed back on itself
            edge.v = -1;
            break;
          }
          prev = cur;
          cur = next;
        }
        if (edge.v >= 0) raw_edges.push_back(std::move(edge));
      }
    }
  }

  // Split boundary mass: interior pixels feed their branch, node cluster mass
  // is shared equally across the incident edge slots.
  std::vector<double> cluster_mass(clusters.size(), 0.0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const Point& m : clusters[c])
      cluster_mass[c] += skel.boundary_contribution[skel.index(m.x, m.y)];
  std::vector<int> cluster_slots(clusters.size(), 0);
  for (const RawEdge& e : raw_edges) {
    cluster_slots[e.u] += 1;
    cluster_slots[e.v] += 1;
  }

  const double total_boundary = std::max(1, skel.total_boundary);
  graph.incident.resize(graph.node_count());
  for (const RawEdge& raw : raw_edges) {
    GraphEdge edge;
    edge.u = raw.u;
    edge.v = raw.v;
    edge.pixel_chain = raw.chain;
    double mass = raw.interior_mass;
    if (cluster_slots[raw.u] > 0) mass += cluster_mass[raw.u] / cluster_slots[raw.u];
    if (cluster_slots[raw.v] > 0) mass += cluster_mass[raw.v] / cluster_slots[raw.v];
    edge.weight = mass / total_boundary;
    if (raw.u == raw.v) {
      edge.angle = 0.0;
    } else {
      const Point& a = graph.nodes[raw.u].pos;
      const Point& b = graph.nodes[raw.v].pos;
      edge.angle = fold_axis_angle(std::atan2(double(b.y - a.y), double(b.x - a.x)) -
                                   graph.principal_axis);
    }
    int eid = static_cast<int>(graph.edges.size());
    graph.incident[raw.u].push_back(eid);
    if (raw.v != raw.u) graph.incident[raw.v].push_back(eid);
    graph.edges.push_back(std::move(edge));
  }

  if (graph.edge_count() == 0) graph.degenerate = (graph.node_count() == 1);
  return graph;
}

nlohmann::json graph_to_json(const SkeletalGraph& graph) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (int v = 0; v < graph.node_count(); ++v) {
    const auto& n = graph.nodes[v];
    doc["nodes"].push_back({{"id", n.label},
                            {"x", n.pos.x},
                            {"y", n.pos.y},
                            {"attr", n.attr}});
  }
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges) {
    doc["edges"].push_back({{"u", graph.nodes[e.u].label},
                            {"v", graph.nodes[e.v].label},
                            {"weight", e.weight},
                            {"angle", e.angle}});
  }
  doc["meta"] = {{"shape_id", graph.shape_id},
                 {"class", graph.class_label},
                 {"principal_axis", graph.principal_axis}};
  return doc;
}

namespace {

std::string id_to_label(const nlohmann::json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  fail(ErrorCode::BadFormat, "graph node id must be a string or integer");
}

}  // namespace

SkeletalGraph graph_from_json(const nlohmann::json& doc) {
  SkeletalGraph graph;
  if (!doc.contains("nodes") || !doc.contains("edges"))
    fail(ErrorCode::BadFormat, "graph JSON needs nodes and edges arrays");
  std::map<std::string, int> id_map;
  for (const auto& jn : doc.at("nodes")) {
    GraphNode node;
    node.label = id_to_label(jn.at("id"));
    node.pos.x = jn.value("x", 0);
    node.pos.y = jn.value("y", 0);
    node.attr = jn.at("attr").get<double>();
    if (id_map.count(node.label))
      fail(ErrorCode::BadFormat, "duplicate node id " + node.label);
    id_map[node.label] = graph.node_count();
    graph.nodes.push_back(std::move(node));
  }
  graph.incident.resize(graph.node_count());
  for (const auto& je : doc.at("edges")) {
    GraphEdge edge;
    auto lookup = [&](const nlohmann::json& id) {
      std::string label = id_to_label(id);
      auto it = id_map.find(label);
      if (it == id_map.end())
        fail(ErrorCode::BadFormat, "edge references unknown node " + label);
      return it->second;
    };
    edge.u = lookup(je.at("u"));
    edge.v = lookup(je.at("v"));
    edge.weight = je.at("weight").get<double>();
    edge.angle = je.at("angle").get<double>();
    int eid = graph.edge_count();
    graph.incident[edge.u].push_back(eid);
    if (edge.v != edge.u) graph.incident[edge.v].push_back(eid);
    graph.edges.push_back(std::move(edge));
  }
  if (doc.contains("meta")) {
    const auto& meta = doc.at("meta");
    graph.shape_id = meta.value("shape_id", std::string{});
    graph.class_label = meta.value("class", std::string{});
    graph.principal_axis = meta.value("principal_axis", 0.0);
  }
  graph.degenerate = graph.node_count() == 1 && graph.edge_count() == 0;
  return graph;
}

SkeletalGraph load_graph_json(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open " + file_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadFormat, file_path + ": " + e.what());
  }
  return graph_from_json(doc);
}

void save_graph_json(const SkeletalGraph& graph, const std::string& file_path) {
  std::ofstream out(file_path);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + file_path);
  out << graph_to_json(graph).dump(2) << "\n";
}

int SpanningTree::alive_node_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.alive;
  return n;
}

int SpanningTree::alive_edge_count() const {
  int n = 0;
  for (const auto& e : edges) n += e.alive;
  return n;
}

double SpanningTree::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges)
    if (e.alive) w += e.weight;
  return w;
}

int SpanningTree::other_end(int e, int v) const {
  return edges[e].u == v ? edges[e].v : edges[e].u;
}

std::vector<int> SpanningTree::neighbors(int v) const {
  std::vector<int> out;
  for (int e : incident[v]) out.push_back(other_end(e, v));
  std::sort(out.begin(), out.end());
  return out;
}

int SpanningTree::edge_between(int u, int v) const {
  for (int e : incident[u])
    if (other_end(e, u) == v) return e;
  return -1;
}

double SpanningTree::subtree_weight(int root, int blocked_edge) const {
  double w = 0.0;
  std::vector<int> stack{root};
  std::vector<std::uint8_t> seen(nodes.size(), 0);
  seen[root] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : incident[v]) {
      if (e == blocked_edge) continue;
      int o = other_end(e, v);
      if (seen[o]) continue;
      seen[o] = 1;
      w += edges[e].weight;
      stack.push_back(o);
    }
  }
  return w;
}

double SpanningTree::chord_angle(int u, int v) const {
  const double dx = nodes[v].x - nodes[u].x;
  const double dy = nodes[v].y - nodes[u].y;
  if (dx == 0.0 && dy == 0.0) return 0.0;
  return fold_axis_angle(std::atan2(dy, dx) - principal_axis);
}

namespace {

void drop_incident(std::vector<int>& list, int e) {
  list.erase(std::remove(list.begin(), list.end(), e), list.end());
}

}  // namespace

int SpanningTree::contract_edge_in_tree(int e, bool& mass_dropped) {
  TreeEdge& contracted = edges[e];
  const int u = std::min(contracted.u, contracted.v);
  const int v = std::max(contracted.u, contracted.v);
  const double w = contracted.weight;

  drop_incident(incident[u], e);
  if (v != u) drop_incident(incident[v], e);
  contracted.alive = false;

  std::vector<int> survivors = incident[u];
  if (v != u)
    survivors.insert(survivors.end(), incident[v].begin(), incident[v].end());

  mass_dropped = survivors.empty();
  if (!mass_dropped) {
    const double share = w / static_cast<double>(survivors.size());
    for (int se : survivors) edges[se].weight += share;
  }

  if (v != u) {
    // merge v into u
    nodes[u].x = 0.5 * (nodes[u].x + nodes[v].x);
    nodes[u].y = 0.5 * (nodes[u].y + nodes[v].y);
    nodes[u].attr = 0.5 * (nodes[u].attr + nodes[v].attr);
    nodes[u].label = nodes[u].label + "+" + nodes[v].label;
    for (int se : incident[v]) {
      if (edges[se].u == v) edges[se].u = u;
      if (edges[se].v == v) edges[se].v = u;
      incident[u].push_back(se);
    }
    incident[v].clear();
    nodes[v].alive = false;
  }
  return u;
}

int SpanningTree::absorb_node_in_tree(int vi, int left_e, int right_e,
                                      double absorbed_cost) {
  const int left_node = other_end(left_e, vi);
  const int right_node = other_end(right_e, vi);
  const double merged_weight =
      edges[left_e].weight + edges[right_e].weight + absorbed_cost;

  // Drop the off-path subtrees hanging at vi.
  for (int e : incident[vi]) {
    if (e == left_e || e == right_e) continue;
    int branch_root = other_end(e, vi);
    std::vector<int> stack{branch_root};
    edges[e].alive = false;
    drop_incident(incident[branch_root], e);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      nodes[x].alive = false;
      for (int xe : incident[x]) {
        edges[xe].alive = false;
        int o = other_end(xe, x);
        drop_incident(incident[o], xe);
        stack.push_back(o);
      }
      incident[x].clear();
    }
  }
  edges[left_e].alive = false;
  edges[right_e].alive = false;
  drop_incident(incident[left_node], left_e);
  drop_incident(incident[right_node], right_e);
  incident[vi].clear();
  nodes[vi].alive = false;

  TreeEdge merged;
  merged.u = left_node;
  merged.v = right_node;
  merged.weight = merged_weight;
  merged.angle = chord_angle(left_node, right_node);
  int eid = static_cast<int>(edges.size());
  edges.push_back(merged);
  incident[left_node].push_back(eid);
  incident[right_node].push_back(eid);
  return eid;
}

SpanningTree max_spanning_tree(const SkeletalGraph& graph) {
  if (graph.node_count() == 0)
    fail(ErrorCode::BadArgument, "empty graph");
  if (graph.connected_components() != 1)
    fail(ErrorCode::DisconnectedGraph,
         "graph is disconnected: " + graph.shape_id);

  SpanningTree tree;
  tree.shape_id = graph.shape_id;
  tree.class_label = graph.class_label;
  tree.principal_axis = graph.principal_axis;
  tree.nodes.reserve(graph.node_count());
  for (const auto& n : graph.nodes)
    tree.nodes.push_back({double(n.pos.x), double(n.pos.y), n.attr, n.label, true});
  tree.incident.resize(graph.node_count());

  std::vector<int> order(graph.edge_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ea = graph.edges[a];
    const auto& eb = graph.edges[b];
    if (ea.weight != eb.weight) return ea.weight > eb.weight;
    const auto ka = std::minmax(ea.u, ea.v);
    const auto kb = std::minmax(eb.u, eb.v);
    if (ka != kb) return ka < kb;
    return a < b;
  });

  UnionFind uf(graph.node_count());
  for (int idx : order) {
    const auto& e = graph.edges[idx];
    if (!uf.unite(e.u, e.v)) continue;
    TreeEdge te{e.u, e.v, e.weight, e.angle, true};
    int eid = static_cast<int>(tree.edges.size());
    tree.incident[e.u].push_back(eid);
    tree.incident[e.v].push_back(eid);
    tree.edges.push_back(te);
  }
  return tree;
}

}  // namespace hbop
