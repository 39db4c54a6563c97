#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "hbop/graph.hpp"
#include "hbop/image.hpp"
#include "hbop/matrix.hpp"

namespace hbop::testsupport {

// --- mask builders ---

/// Rows of '#'/'1' = shape, anything else = background. Rows must be equal
/// length.
ShapeImage mask_from_strings(const std::vector<std::string>& rows,
                             std::string id = "test");

ShapeImage rect_mask(int width, int height, int margin = 3,
                     std::string id = "rect");
ShapeImage disk_mask(int radius, int margin = 3, std::string id = "disk");
/// Square ring: outer square with a centered square hole.
ShapeImage annulus_mask(int outer, int hole, int margin = 3,
                        std::string id = "annulus");
ShapeImage plus_mask(int arm_length, int arm_width, std::string id = "plus");

ShapeImage square_mask(int side, int margin = 4, std::string id = "square");
/// Rectangle with a small protrusion centered on the top edge: a boundary
/// perturbation that inserts a junction into an otherwise straight skeleton.
ShapeImage protruded_rect_mask(int width, int height, int bump_width,
                               int bump_length, int margin = 4,
                               std::string id = "rect-bump");

/// Random star polygon rasterized on a grid; deterministic in the seed and
/// guaranteed to be a single 4-connected component.
ShapeImage noisy_polygon_mask(int size, int vertices, double noise,
                              std::uint32_t seed, std::string id = "");

ShapeImage rotate90(const ShapeImage& shape);

/// Paint a filled rectangle onto a copy of the mask (a boundary protrusion)
/// and revalidate it.
ShapeImage add_bump(const ShapeImage& shape, int x0, int y0, int width,
                    int height, std::string id = {});

// --- tree builders ---

struct EdgeSpec {
  int u;
  int v;
  double weight;
  double angle = 0.0;
};

/// Build a spanning tree directly (bypassing ingestion) for path and kernel
/// tests. Positions default to a line, attrs to 0.
SpanningTree make_tree(int node_count, const std::vector<EdgeSpec>& edges,
                       std::vector<double> attrs = {},
                       std::vector<std::pair<double, double>> positions = {});

/// Hand-built skeletal graph (possibly with parallel edges or self loops).
SkeletalGraph make_skeletal_graph(int node_count,
                                  const std::vector<EdgeSpec>& edges);

/// Random tree over n nodes: node i attaches to a random earlier node with a
/// weight in [0.05, 1].
SpanningTree random_tree(int node_count, std::mt19937& rng);

// --- independent oracles (kept free of the library's algorithms) ---

/// Ordered simple paths with 1..s edges, counted by enumerating all node
/// tuples and checking consecutive adjacency.
long oracle_path_count(const SpanningTree& tree, int s);

/// Maximum spanning tree weight by trying every edge subset of size V-1.
double oracle_max_spanning_weight(const SkeletalGraph& graph);

/// good-matches count straight from the definition, without sorting: the
/// number of query-class shapes whose (distance, id) key precedes every
/// different-class key.
int oracle_good_matches(const std::vector<double>& distance_row,
                        const std::vector<std::string>& ids,
                        const std::vector<std::string>& labels,
                        const std::string& query_class);

/// Minimum of 1/2 a'Ka over the simplex-with-box feasible set by recursive
/// grid search. `steps` grid points span [0, 1].
double oracle_one_class_objective(const Matrix& gram, double nu, int steps);

}  // namespace hbop::testsupport
