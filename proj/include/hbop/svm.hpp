#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbop/matrix.hpp"

namespace hbop {

/// Single-class nu-SVM solution over a normalized Gram matrix:
/// min 1/2 a'Ka  s.t.  0 <= a_i <= 1/(nu n), sum a_i = 1.
/// w = sum_i a_i phi(h_i); rho is the margin offset.
struct OneClassModel {
  std::vector<double> alpha;
  double rho = 0.0;
  std::vector<int> support_ids;  // alpha_i > 0
  double norm_w = 0.0;           // sqrt(a'Ka)
  bool indefinite_kernel = false;
  int iterations = 0;
  double kkt_violation = 0.0;
  std::uint64_t config_fingerprint = 0;
};

OneClassModel fit_one_class(const Matrix& gram, double nu);

nlohmann::json model_to_json(const OneClassModel& model);

/// Soft-margin binary SVM on a precomputed kernel.
struct BinaryModel {
  std::vector<double> alpha;   // dual coefficients (0..C)
  std::vector<int> labels;     // +1 / -1 per training point
  double bias = 0.0;
  std::vector<int> support_ids;
  double C = 1.0;
  bool indefinite_kernel = false;
  int iterations = 0;

  /// kernel_row[i] = K(x, train_i)
  double decision(const std::vector<double>& kernel_row) const;
  int predict(const std::vector<double>& kernel_row) const;
};

BinaryModel fit_binary(const Matrix& gram, const std::vector<int>& labels,
                       double C);

struct MarginSelection {
  double C = 1.0;
  bool feasible = false;  // a zero-false-positive C exists
  int true_positives = 0;
  int false_positives = 0;
};

/// Pick the C from the grid maximizing true positives on the evaluation rows
/// subject to zero false positives; ties take the smallest C. When every C
/// produces false positives, returns the one minimizing them, flagged
/// infeasible.
MarginSelection select_margin_parameter(const Matrix& full_gram,
                                        const std::vector<int>& labels,
                                        const std::vector<int>& train_indices,
                                        const std::vector<int>& eval_indices,
                                        const std::vector<double>& c_grid);

}  // namespace hbop
