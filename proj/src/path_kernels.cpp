#include "hbop/path_kernels.hpp"

#include <cmath>
#include <cstdlib>

#include "hbop/errors.hpp"
#include "hbop/geometry.hpp"

namespace hbop {

void PathKernelConfig::validate() const {
  if (sigma_vertex <= 0.0 || sigma_edge <= 0.0)
    fail(ErrorCode::BadArgument, "kernel bandwidths must be positive");
  if (D < 0) fail(ErrorCode::BadArgument, "D must be >= 0");
}

double k_node(double a, double b, const PathKernelConfig& cfg) {
  const double d = a - b;
  return std::exp(-(d * d) / (2.0 * cfg.sigma_vertex * cfg.sigma_vertex));
}

double k_edge(const EdgeAttr& a, const EdgeAttr& b, const PathKernelConfig& cfg) {
  const double dw = a.weight - b.weight;
  const double da = axis_angle_diff(a.angle, b.angle);
  const double d2 = dw * dw + da * da;
  return std::exp(-d2 / (2.0 * cfg.sigma_edge * cfg.sigma_edge));
}

double k_classic(const Path& a, const Path& b, const PathKernelConfig& cfg) {
  if (a.length() != b.length()) return 0.0;
  double value = k_node(a.node_attrs[0], b.node_attrs[0], cfg);
  for (std::size_t i = 0; i < a.length(); ++i) {
    value *= k_edge(a.edge_attrs[i], b.edge_attrs[i], cfg);
    value *= k_node(a.node_attrs[i + 1], b.node_attrs[i + 1], cfg);
  }
  return value;
}

double d_path2(const Path& a, const Path& b, const PathKernelConfig& cfg) {
  return k_classic(a, a, cfg) + k_classic(b, b, cfg) - 2.0 * k_classic(a, b, cfg);
}

double k_edit(const PathHierarchy& a, const PathHierarchy& b,
              const PathKernelConfig& cfg) {
  if (a.max_reductions != cfg.D || b.max_reductions != cfg.D)
    fail(ErrorCode::MismatchedD, "hierarchies built with a different D");
  const long len_a = static_cast<long>(a.root().length());
  const long len_b = static_cast<long>(b.root().length());
  if (std::labs(len_a - len_b) > cfg.D) return 0.0;

  // Missing levels (path exhausted early) contribute nothing; unequal-length
  // level pairs vanish inside k_classic.
  double sum = 0.0;
  for (std::size_t k = 0; k < a.level_count(); ++k)
    for (std::size_t l = 0; l < b.level_count(); ++l)
      sum += k_classic(a.levels[k], b.levels[l], cfg);
  return sum / (cfg.D + 1);
}

}  // namespace hbop
