#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hbop/bag_kernels.hpp"
#include "hbop/errors.hpp"
#include "hbop/matrix.hpp"
#include "hbop/path_kernels.hpp"
#include "support/synthetic.hpp"

using namespace hbop;
using namespace hbop::testsupport;

namespace {

const PathKernelConfig kCfg{0.1, 0.1, 2};

Path single_edge_path(double attr_a, double attr_b, double weight, double angle) {
  Path p;
  p.node_ids = {0, 1};
  p.node_attrs = {attr_a, attr_b};
  p.edge_ids = {0};
  p.edge_attrs = {{weight, angle}};
  return p;
}

}  // namespace

TEST_CASE("node kernel values") {
  CHECK(k_node(0.37, 0.37, kCfg) == 1.0);
  CHECK(k_node(0.0, 0.1, kCfg) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK(k_node(0.0, 1.0, kCfg) ==
        doctest::Approx(1.9287498479639178e-22).epsilon(1e-12));
}

TEST_CASE("edge kernel folds the angle difference") {
  EdgeAttr a{0.5, 0.01};
  EdgeAttr b{0.5, kPi - 0.01};
  CHECK(k_edge(a, a, kCfg) == 1.0);
  // delta = 0.02 across the seam
  const double expected = std::exp(-(0.02 * 0.02) / (2.0 * 0.1 * 0.1));
  CHECK(k_edge(a, b, kCfg) == doctest::Approx(expected).epsilon(1e-15));
  EdgeAttr c{0.4, 0.01};
  CHECK(k_edge(a, c, kCfg) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
}

TEST_CASE("classic kernel is one on identical paths and zero across lengths") {
  SpanningTree tree = make_tree(
      4, {{0, 1, 0.3, 0.2}, {1, 2, 0.4, 1.1}, {2, 3, 0.3, 0.6}},
      {0.1, 0.5, 0.9, 0.3});
  Path h3 = make_path(tree, {0, 1, 2, 3});
  Path h2 = make_path(tree, {0, 1, 2});
  CHECK(k_classic(h3, h3, kCfg) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k_classic(h3, h2, kCfg) == 0.0);
}

TEST_CASE("single-edge classic kernel reduces to one node factor") {
  Path a = single_edge_path(0.0, 0.0, 0.4, 0.3);
  Path b = single_edge_path(0.1, 0.0, 0.4, 0.3);
  CHECK(k_classic(a, b, kCfg) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
}

TEST_CASE("path distance follows the kernel") {
  Path a = single_edge_path(0.0, 0.0, 0.4, 0.3);
  Path b = single_edge_path(0.1, 0.0, 0.4, 0.3);
  CHECK(d_path2(a, a, kCfg) == 0.0);
  CHECK(d_path2(a, b, kCfg) == doctest::Approx(0.7869386805747332).epsilon(1e-12));
  SpanningTree tree = make_tree(3, {{0, 1, 0.5, 0.0}, {1, 2, 0.5, 0.0}});
  Path h2 = make_path(tree, {0, 1, 2});
  CHECK(d_path2(a, h2, kCfg) == doctest::Approx(2.0));
}

TEST_CASE("edit kernel reproduces the worked D=2 example") {
  // |h| = 4 on one tree, |h'| = 3 on another
  SpanningTree t1 = make_tree(
      5, {{0, 1, 0.25, 0.1}, {1, 2, 0.2, 0.8}, {2, 3, 0.3, 1.4}, {3, 4, 0.25, 0.4}},
      {0.2, 0.4, 0.6, 0.8, 1.0});
  SpanningTree t2 = make_tree(
      4, {{0, 1, 0.35, 0.2}, {1, 2, 0.3, 1.0}, {2, 3, 0.35, 0.5}},
      {0.25, 0.45, 0.65, 0.85});
  PathHierarchy H = build_hierarchy(t1, make_path(t1, {0, 1, 2, 3, 4}), 2);
  PathHierarchy Hp = build_hierarchy(t2, make_path(t2, {0, 1, 2, 3}), 2);
  REQUIRE(H.levels[0].length() == 4);
  REQUIRE(Hp.levels[0].length() == 3);

  const double expected = (k_classic(H.levels[1], Hp.levels[0], kCfg) +
                           k_classic(H.levels[2], Hp.levels[1], kCfg)) /
                          3.0;
  CHECK(k_edit(H, Hp, kCfg) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected > 0.0);
}

TEST_CASE("edit kernel is one on an identical full hierarchy") {
  SpanningTree tree = make_tree(
      5, {{0, 1, 0.25, 0.1}, {1, 2, 0.2, 0.8}, {2, 3, 0.3, 1.4}, {3, 4, 0.25, 0.4}},
      {0.2, 0.4, 0.6, 0.8, 1.0});
  PathHierarchy H = build_hierarchy(tree, make_path(tree, {0, 1, 2, 3, 4}), 2);
  REQUIRE(H.level_count() == 3);
  CHECK(k_edit(H, H, kCfg) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("edit kernel vanishes when lengths differ by more than D") {
  SpanningTree t6 = make_tree(
      7, {{0, 1, 0.2, 0.0}, {1, 2, 0.1, 0.0}, {2, 3, 0.2, 0.0},
          {3, 4, 0.1, 0.0}, {4, 5, 0.2, 0.0}, {5, 6, 0.2, 0.0}});
  SpanningTree t2 = make_tree(3, {{0, 1, 0.5, 0.0}, {1, 2, 0.5, 0.0}});
  PathHierarchy H6 = build_hierarchy(t6, make_path(t6, {0, 1, 2, 3, 4, 5, 6}), 2);
  PathHierarchy H2 = build_hierarchy(t2, make_path(t2, {0, 1, 2}), 2);
  CHECK(k_edit(H6, H2, kCfg) == 0.0);
}

TEST_CASE("edit kernel rejects hierarchies built with a different D") {
  SpanningTree tree = make_tree(3, {{0, 1, 0.5, 0.0}, {1, 2, 0.5, 0.0}});
  PathHierarchy H1 = build_hierarchy(tree, make_path(tree, {0, 1, 2}), 1);
  PathHierarchy H2 = build_hierarchy(tree, make_path(tree, {0, 1, 2}), 2);
  try {
    k_edit(H1, H2, kCfg);
    FAIL("expected MismatchedD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedD);
  }
}

TEST_CASE("kernel symmetry, range, and length filters over random bags") {
  std::mt19937 rng(53);
  SpanningTree t1 = random_tree(7, rng);
  SpanningTree t2 = random_tree(6, rng);
  BagOfPaths b1 = enumerate_bag(t1, 4, 2);
  BagOfPaths b2 = enumerate_bag(t2, 4, 2);
  for (std::size_t i = 0; i < std::min<std::size_t>(b1.size(), 25); ++i)
    for (std::size_t j = 0; j < std::min<std::size_t>(b2.size(), 25); ++j) {
      const auto& Ha = b1.hierarchies[i];
      const auto& Hb = b2.hierarchies[j];
      const double kc = k_classic(Ha.root(), Hb.root(), kCfg);
      const double ke = k_edit(Ha, Hb, kCfg);
      CHECK(kc == k_classic(Hb.root(), Ha.root(), kCfg));
      CHECK(ke == doctest::Approx(k_edit(Hb, Ha, kCfg)).epsilon(1e-15));
      CHECK(kc >= 0.0);
      CHECK(kc <= 1.0);
      CHECK(ke >= 0.0);
      CHECK(ke <= kCfg.D + 1.0);
      if (kc != 0.0) CHECK(Ha.root().length() == Hb.root().length());
      if (ke != 0.0)
        CHECK(std::abs(static_cast<long>(Ha.root().length()) -
                       static_cast<long>(Hb.root().length())) <= kCfg.D);
    }
}

TEST_CASE("edit kernel Gram over sampled hierarchies is numerically PSD") {
  std::mt19937 rng(59);
  std::vector<PathHierarchy> sample;
  for (int t = 0; t < 12 && sample.size() < 200; ++t) {
    SpanningTree tree = random_tree(6 + t % 3, rng);
    BagOfPaths bag = enumerate_bag(tree, 4, 2);
    for (const auto& h : bag.hierarchies) {
      sample.push_back(h);
      if (sample.size() >= 200) break;
    }
  }
  const std::size_t n = sample.size();
  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = k_edit(sample[i], sample[j], kCfg);
      gram.at(i, j) = v;
      gram.at(j, i) = v;
    }
  std::vector<double> eig = symmetric_eigenvalues(gram);
  CHECK(eig.front() >= -1e-8 * std::max(eig.back(), 1.0));
}

TEST_CASE("a subdivided path matches under edit but not classic") {
  // h in a 2-node tree; h' is the same stroke with a midpoint node inserted
  SpanningTree plain = make_tree(2, {{0, 1, 0.6, 0.3}}, {0.2, 0.8},
                                 {{0.0, 0.0}, {10.0, 0.0}});
  SpanningTree split = make_tree(
      3, {{0, 1, 0.3, 0.3}, {1, 2, 0.3, 0.3}}, {0.2, 0.5, 0.8},
      {{0.0, 0.0}, {5.0, 0.0}, {10.0, 0.0}});
  PathHierarchy H = build_hierarchy(plain, make_path(plain, {0, 1}), 2);
  PathHierarchy Hp = build_hierarchy(split, make_path(split, {0, 1, 2}), 2);
  CHECK(k_classic(H.root(), Hp.root(), kCfg) == 0.0);
  CHECK(k_edit(H, Hp, kCfg) > 0.0);

  PathKernelConfig d1 = kCfg;
  d1.D = 1;
  PathHierarchy H1 = build_hierarchy(plain, make_path(plain, {0, 1}), 1);
  PathHierarchy Hp1 = build_hierarchy(split, make_path(split, {0, 1, 2}), 1);
  CHECK(k_edit(H1, Hp1, d1) > 0.0);
}
