#pragma once

#include <vector>

#include "hbop/matrix.hpp"
#include "hbop/path_kernels.hpp"
#include "hbop/svm.hpp"

namespace hbop {

enum class PathKernelKind { Classic, Edit };

struct BagKernelConfig {
  double nu = 0.9;
  double sigma_change = 0.3;
  double sigma_matching = 1.0;
  PathKernelKind path_kernel = PathKernelKind::Classic;

  void validate() const;
};

/// Raw path-kernel value between two hierarchies under the selected kind.
/// Classic compares the root paths; Edit compares whole hierarchies.
double path_kernel_value(const PathHierarchy& a, const PathHierarchy& b,
                         PathKernelKind kind, const PathKernelConfig& cfg);

/// Self kernels k(h_i, h_i) of every hierarchy in a bag.
std::vector<double> self_kernels(const BagOfPaths& bag, PathKernelKind kind,
                                 const PathKernelConfig& cfg);

/// Raw cross matrix k(h_i, h'_j).
Matrix raw_cross_matrix(const BagOfPaths& a, const BagOfPaths& b,
                        PathKernelKind kind, const PathKernelConfig& cfg);

/// Unit-sphere normalization k(i,j)/sqrt(k(i,i) k(j,j)). The square form
/// gets a unit diagonal; entries stay in [0, 1].
Matrix normalize_square(const Matrix& raw);
Matrix normalize_cross(const Matrix& raw, const std::vector<double>& self_a,
                       const std::vector<double>& self_b);

/// Everything reusable per bag: self kernels and the one-class model fitted
/// on the normalized self Gram.
struct BagProfile {
  std::vector<double> self_kernel;
  OneClassModel model;
};

BagProfile profile_bag(const BagOfPaths& bag, PathKernelKind kind,
                       const PathKernelConfig& path_cfg, double nu);

// --- kernels on precomputed normalized matrices ---

/// Symmetrized mean of best matches. Not positive definite in general.
double k_max(const Matrix& normalized_cross);

/// Mean RBF of pairwise path distances; positive definite by construction.
double k_matching(const Matrix& normalized_cross, double sigma_matching);

/// Cosine of the angle between the two one-class mean vectors, clamped to
/// [-1, 1].
double mean_vector_cosine(const std::vector<double>& alpha1,
                          const Matrix& normalized_cross,
                          const std::vector<double>& alpha2, double norm_w1,
                          double norm_w2);

double d_change_from_cosine(double cosine);
double k_change_from_distance(double distance, double sigma_change);

/// Desobry contrast: angle between mean vectors over the sum of the two
/// region half-angles. Diagnostic only.
double d_desobry(double cosine, const OneClassModel& m1, const OneClassModel& m2);

double k_suard(const std::vector<double>& alpha1, const Matrix& normalized_cross,
               const std::vector<double>& alpha2, double rho1, double rho2);

// --- convenience wrappers on bags ---

double k_max(const BagOfPaths& a, const BagOfPaths& b, PathKernelKind kind,
             const PathKernelConfig& cfg);
double k_matching(const BagOfPaths& a, const BagOfPaths& b, PathKernelKind kind,
                  const PathKernelConfig& cfg, double sigma_matching);
double d_change(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                const BagProfile& pb, PathKernelKind kind,
                const PathKernelConfig& cfg);
double k_change(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                const BagProfile& pb, PathKernelKind kind,
                const PathKernelConfig& cfg, double sigma_change);
double d_desobry(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                 const BagProfile& pb, PathKernelKind kind,
                 const PathKernelConfig& cfg);
double k_suard(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
               const BagProfile& pb, PathKernelKind kind,
               const PathKernelConfig& cfg);

}  // namespace hbop
