#pragma once

#include "hbop/paths.hpp"

namespace hbop {

struct PathKernelConfig {
  double sigma_vertex = 0.1;
  double sigma_edge = 0.1;
  int D = 2;

  void validate() const;
};

/// Gaussian RBF between two node attributes; 1 at equality.
double k_node(double a, double b, const PathKernelConfig& cfg);

/// Gaussian RBF between edge features (weight, angle). The angle difference
/// is circular over the axis range [0, pi).
double k_edge(const EdgeAttr& a, const EdgeAttr& b, const PathKernelConfig& cfg);

/// Product kernel over aligned node and edge sequences; 0 when the paths have
/// different lengths. Always 1 on identical paths.
double k_classic(const Path& a, const Path& b, const PathKernelConfig& cfg);

/// Squared kernel distance K(a,a) + K(b,b) - 2 K(a,b) under k_classic.
double d_path2(const Path& a, const Path& b, const PathKernelConfig& cfg);

/// Hierarchical edit kernel: mean of classic kernels between reduced levels
/// of equal length; 0 when the root lengths differ by more than D.
double k_edit(const PathHierarchy& a, const PathHierarchy& b,
              const PathKernelConfig& cfg);

}  // namespace hbop
