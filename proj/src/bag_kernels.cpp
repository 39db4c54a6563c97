#include "hbop/bag_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "hbop/errors.hpp"

namespace hbop {

void BagKernelConfig::validate() const {
  if (nu <= 0.0 || nu > 1.0) fail(ErrorCode::BadArgument, "nu must be in (0, 1]");
  if (sigma_change <= 0.0 || sigma_matching <= 0.0)
    fail(ErrorCode::BadArgument, "bag kernel bandwidths must be positive");
}

double path_kernel_value(const PathHierarchy& a, const PathHierarchy& b,
                         PathKernelKind kind, const PathKernelConfig& cfg) {
  if (kind == PathKernelKind::Classic)
    return k_classic(a.root(), b.root(), cfg);
  return k_edit(a, b, cfg);
}

std::vector<double> self_kernels(const BagOfPaths& bag, PathKernelKind kind,
                                 const PathKernelConfig& cfg) {
  std::vector<double> out(bag.size());
  for (std::size_t i = 0; i < bag.size(); ++i)
    out[i] = path_kernel_value(bag.hierarchies[i], bag.hierarchies[i], kind, cfg);
  return out;
}

Matrix raw_cross_matrix(const BagOfPaths& a, const BagOfPaths& b,
                        PathKernelKind kind, const PathKernelConfig& cfg) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      m.at(i, j) = path_kernel_value(a.hierarchies[i], b.hierarchies[j], kind, cfg);
  return m;
}

Matrix normalize_square(const Matrix& raw) {
  if (!raw.is_square()) fail(ErrorCode::BadArgument, "expected a square matrix");
  const std::size_t n = raw.rows();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double self = raw.at(i, i);
    if (self <= 0.0)
      fail(ErrorCode::ZeroSelfKernel,
           "non-positive self kernel at index " + std::to_string(i));
    inv_sqrt[i] = 1.0 / std::sqrt(self);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.at(i, j) = i == j ? 1.0 : raw.at(i, j) * inv_sqrt[i] * inv_sqrt[j];
  return out;
}

Matrix normalize_cross(const Matrix& raw, const std::vector<double>& self_a,
                       const std::vector<double>& self_b) {
  if (raw.rows() != self_a.size() || raw.cols() != self_b.size())
    fail(ErrorCode::BadArgument, "self-kernel sizes do not match the matrix");
  for (double s : self_a)
    if (s <= 0.0) fail(ErrorCode::ZeroSelfKernel, "non-positive self kernel");
  for (double s : self_b)
    if (s <= 0.0) fail(ErrorCode::ZeroSelfKernel, "non-positive self kernel");
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.rows(); ++i)
    for (std::size_t j = 0; j < raw.cols(); ++j)
      out.at(i, j) = raw.at(i, j) / std::sqrt(self_a[i] * self_b[j]);
  return out;
}

BagProfile profile_bag(const BagOfPaths& bag, PathKernelKind kind,
                       const PathKernelConfig& path_cfg, double nu) {
  if (bag.size() == 0) fail(ErrorCode::EmptyBag, "bag of " + bag.shape_id + " is empty");
  BagProfile profile;
  profile.self_kernel = self_kernels(bag, kind, path_cfg);
  Matrix raw = raw_cross_matrix(bag, bag, kind, path_cfg);
  Matrix normalized = normalize_square(raw);
  profile.model = fit_one_class(normalized, nu);
  return profile;
}

double k_max(const Matrix& normalized_cross) {
  const std::size_t n1 = normalized_cross.rows();
  const std::size_t n2 = normalized_cross.cols();
  if (n1 == 0 || n2 == 0) fail(ErrorCode::EmptyBag, "empty bag in k_max");

  double forward = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    double best = normalized_cross.at(i, 0);
    for (std::size_t j = 1; j < n2; ++j) best = std::max(best, normalized_cross.at(i, j));
    forward += best;
  }
  forward /= static_cast<double>(n1);

  double backward = 0.0;
  for (std::size_t j = 0; j < n2; ++j) {
    double best = normalized_cross.at(0, j);
    for (std::size_t i = 1; i < n1; ++i) best = std::max(best, normalized_cross.at(i, j));
    backward += best;
  }
  backward /= static_cast<double>(n2);
  return 0.5 * (forward + backward);
}

double k_matching(const Matrix& normalized_cross, double sigma_matching) {
  const std::size_t n1 = normalized_cross.rows();
  const std::size_t n2 = normalized_cross.cols();
  if (n1 == 0 || n2 == 0) fail(ErrorCode::EmptyBag, "empty bag in k_matching");
  if (sigma_matching <= 0.0) fail(ErrorCode::BadArgument, "sigma_matching must be > 0");

  const double inv = 1.0 / (2.0 * sigma_matching * sigma_matching);
  double sum = 0.0;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      // normalized self kernels are 1, so d^2 = 2 - 2 k
      const double d2 = 2.0 - 2.0 * normalized_cross.at(i, j);
      sum += std::exp(-d2 * inv);
    }
  return sum / (static_cast<double>(n1) * static_cast<double>(n2));
}

double mean_vector_cosine(const std::vector<double>& alpha1,
                          const Matrix& normalized_cross,
                          const std::vector<double>& alpha2, double norm_w1,
                          double norm_w2) {
  if (norm_w1 <= 0.0 || norm_w2 <= 0.0)
    fail(ErrorCode::DegenerateModel, "one-class mean vector has zero norm");
  if (alpha1.size() != normalized_cross.rows() ||
      alpha2.size() != normalized_cross.cols())
    fail(ErrorCode::BadArgument, "alpha sizes do not match the cross matrix");
  double num = 0.0;
  for (std::size_t i = 0; i < alpha1.size(); ++i) {
    if (alpha1[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < alpha2.size(); ++j)
      row += normalized_cross.at(i, j) * alpha2[j];
    num += alpha1[i] * row;
  }
  return std::clamp(num / (norm_w1 * norm_w2), -1.0, 1.0);
}

double d_change_from_cosine(double cosine) {
  return std::acos(std::clamp(cosine, -1.0, 1.0));
}

double k_change_from_distance(double distance, double sigma_change) {
  if (sigma_change <= 0.0) fail(ErrorCode::BadArgument, "sigma_change must be > 0");
  return std::exp(-(distance * distance) / (2.0 * sigma_change * sigma_change));
}

double d_desobry(double cosine, const OneClassModel& m1, const OneClassModel& m2) {
  const double arc1 = std::acos(std::clamp(m1.rho / m1.norm_w, -1.0, 1.0));
  const double arc2 = std::acos(std::clamp(m2.rho / m2.norm_w, -1.0, 1.0));
  const double denom = arc1 + arc2;
  if (denom == 0.0)
    fail(ErrorCode::ZeroDenominator, "both one-class regions are degenerate arcs");
  return d_change_from_cosine(cosine) / denom;
}

double k_suard(const std::vector<double>& alpha1, const Matrix& normalized_cross,
               const std::vector<double>& alpha2, double rho1, double rho2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha1.size(); ++i) {
    if (alpha1[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < alpha2.size(); ++j)
      row += normalized_cross.at(i, j) * alpha2[j];
    sum += alpha1[i] * row;
  }
  return rho1 * rho2 * sum;
}

namespace {

Matrix normalized_cross_of(const BagOfPaths& a, const BagOfPaths& b,
                           PathKernelKind kind, const PathKernelConfig& cfg) {
  if (a.size() == 0 || b.size() == 0)
    fail(ErrorCode::EmptyBag, "empty bag in kernel evaluation");
  Matrix raw = raw_cross_matrix(a, b, kind, cfg);
  return normalize_cross(raw, self_kernels(a, kind, cfg), self_kernels(b, kind, cfg));
}

}  // namespace

double k_max(const BagOfPaths& a, const BagOfPaths& b, PathKernelKind kind,
             const PathKernelConfig& cfg) {
  return k_max(normalized_cross_of(a, b, kind, cfg));
}

double k_matching(const BagOfPaths& a, const BagOfPaths& b, PathKernelKind kind,
                  const PathKernelConfig& cfg, double sigma_matching) {
  return k_matching(normalized_cross_of(a, b, kind, cfg), sigma_matching);
}

double d_change(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                const BagProfile& pb, PathKernelKind kind,
                const PathKernelConfig& cfg) {
  Matrix cross = normalize_cross(raw_cross_matrix(a, b, kind, cfg),
                                 pa.self_kernel, pb.self_kernel);
  const double cosine = mean_vector_cosine(pa.model.alpha, cross, pb.model.alpha,
                                           pa.model.norm_w, pb.model.norm_w);
  return d_change_from_cosine(cosine);
}

double k_change(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                const BagProfile& pb, PathKernelKind kind,
                const PathKernelConfig& cfg, double sigma_change) {
  return k_change_from_distance(d_change(a, pa, b, pb, kind, cfg), sigma_change);
}

double d_desobry(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
                 const BagProfile& pb, PathKernelKind kind,
                 const PathKernelConfig& cfg) {
  Matrix cross = normalize_cross(raw_cross_matrix(a, b, kind, cfg),
                                 pa.self_kernel, pb.self_kernel);
  const double cosine = mean_vector_cosine(pa.model.alpha, cross, pb.model.alpha,
                                           pa.model.norm_w, pb.model.norm_w);
  return d_desobry(cosine, pa.model, pb.model);
}

double k_suard(const BagOfPaths& a, const BagProfile& pa, const BagOfPaths& b,
               const BagProfile& pb, PathKernelKind kind,
               const PathKernelConfig& cfg) {
  Matrix cross = normalize_cross(raw_cross_matrix(a, b, kind, cfg),
                                 pa.self_kernel, pb.self_kernel);
  return k_suard(pa.model.alpha, cross, pb.model.alpha, pa.model.rho,
                 pb.model.rho);
}

}  // namespace hbop
