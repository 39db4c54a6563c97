#include "hbop/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hbop/errors.hpp"

namespace hbop {

namespace {

constexpr double kKktTol = 1e-6;
constexpr int kMaxIterations = 100000;
constexpr double kEta = 1e-12;  // curvature floor for indefinite kernels

}  // namespace

OneClassModel fit_one_class(const Matrix& gram, double nu) {
  if (!gram.is_square() || gram.rows() == 0)
    fail(ErrorCode::BadArgument, "gram matrix must be square and non-empty");
  if (nu <= 0.0 || nu > 1.0)
    fail(ErrorCode::BadArgument, "nu must be in (0, 1]");

  const std::size_t n = gram.rows();
  const double C = 1.0 / (nu * static_cast<double>(n));

  OneClassModel model;
  model.alpha.assign(n, 1.0 / static_cast<double>(n));  // feasible start

  // gradient g = K alpha
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += gram.at(i, j) * model.alpha[j];
    g[i] = s;
  }

  int iter = 0;
  double violation = 0.0;
  bool indefinite = false;
  for (; iter < kMaxIterations; ++iter) {
    // Maximal violating pair: move mass from the largest gradient (with
    // alpha > 0) to the smallest gradient (with alpha < C).
    int up = -1, down = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (model.alpha[i] < C && g[i] < g_min) {
        g_min = g[i];
        up = static_cast<int>(i);
      }
      if (model.alpha[i] > 0.0 && g[i] > g_max) {
        g_max = g[i];
        down = static_cast<int>(i);
      }
    }
    violation = g_max - g_min;
    if (up < 0 || down < 0 || violation < kKktTol) break;

    double eta = gram.at(up, up) + gram.at(down, down) - 2.0 * gram.at(up, down);
    if (eta <= 0.0) {
      indefinite = true;
      eta = kEta;
    }
    double delta = (g_max - g_min) / eta;
    delta = std::min(delta, C - model.alpha[up]);
    delta = std::min(delta, model.alpha[down]);
    if (delta <= 0.0) break;

    model.alpha[up] += delta;
    model.alpha[down] -= delta;
    for (std::size_t i = 0; i < n; ++i)
      g[i] += delta * (gram.at(i, up) - gram.at(i, down));
  }
  model.iterations = iter;
  model.kkt_violation = std::max(violation, 0.0);
  model.indefinite_kernel = indefinite;
  if (iter >= kMaxIterations && violation >= kKktTol)
    fail(ErrorCode::NonConvergence,
         "one-class solver hit the iteration cap with KKT violation " +
             std::to_string(violation));

  // Projection: clamp to the box, then push the simplex residual into the
  // coordinate with the most slack.
  double sum = 0.0;
  for (double& a : model.alpha) {
    a = std::clamp(a, 0.0, C);
    sum += a;
  }
  double residual = 1.0 - sum;
  if (residual != 0.0) {
    std::size_t target = 0;
    double best_slack = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double slack = residual > 0.0 ? C - model.alpha[i] : model.alpha[i];
      if (slack > best_slack) {
        best_slack = slack;
        target = i;
      }
    }
    model.alpha[target] = std::clamp(model.alpha[target] + residual, 0.0, C);
  }

  // Recompute exact gradient for rho and the norm.
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += gram.at(i, j) * model.alpha[j];
    g[i] = s;
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm2 += model.alpha[i] * g[i];
  model.norm_w = std::sqrt(std::max(norm2, 0.0));

  const double bound_eps = 1e-9 * C;
  double rho_sum = 0.0;
  int rho_count = 0;
  double rho_min_sv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (model.alpha[i] > bound_eps) {
      model.support_ids.push_back(static_cast<int>(i));
      rho_min_sv = std::min(rho_min_sv, g[i]);
      if (model.alpha[i] < C - bound_eps) {
        rho_sum += g[i];
        ++rho_count;
      }
    }
  }
  model.rho = rho_count > 0 ? rho_sum / rho_count : rho_min_sv;
  return model;
}

nlohmann::json model_to_json(const OneClassModel& model) {
  return {{"alpha", model.alpha},
          {"rho", model.rho},
          {"support_ids", model.support_ids},
          {"norm_w", model.norm_w},
          {"indefinite_kernel", model.indefinite_kernel},
          {"config_fingerprint", model.config_fingerprint}};
}

double BinaryModel::decision(const std::vector<double>& kernel_row) const {
  double s = bias;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0.0) s += alpha[i] * labels[i] * kernel_row[i];
  return s;
}

int BinaryModel::predict(const std::vector<double>& kernel_row) const {
  return decision(kernel_row) >= 0.0 ? 1 : -1;
}

BinaryModel fit_binary(const Matrix& gram, const std::vector<int>& labels,
                       double C) {
  const std::size_t n = gram.rows();
  if (!gram.is_square() || labels.size() != n)
    fail(ErrorCode::BadArgument, "gram/labels size mismatch");
  if (C <= 0.0) fail(ErrorCode::BadArgument, "C must be positive");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else fail(ErrorCode::BadArgument, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    fail(ErrorCode::SingleClass, "binary training needs both labels");

  BinaryModel model;
  model.C = C;
  model.labels = labels;
  model.alpha.assign(n, 0.0);

  // Minimize 1/2 a'Qa - sum a, Q_ij = y_i y_j K_ij, s.t. 0<=a<=C, y'a = 0.
  // g_i = (Qa)_i - 1; maximal violating pair on -y g.
  std::vector<double> g(n, -1.0);
  bool indefinite = false;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    int i_up = -1, i_low = -1;
    double m_up = std::numeric_limits<double>::infinity();
    double m_low = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const bool in_up = (labels[t] == 1 && model.alpha[t] < C) ||
                         (labels[t] == -1 && model.alpha[t] > 0.0);
      const bool in_low = (labels[t] == 1 && model.alpha[t] > 0.0) ||
                          (labels[t] == -1 && model.alpha[t] < C);
      const double v = labels[t] * g[t];
      if (in_up && v < m_up) {
        m_up = v;
        i_up = static_cast<int>(t);
      }
      if (in_low && v > m_low) {
        m_low = v;
        i_low = static_cast<int>(t);
      }
    }
    if (i_up < 0 || i_low < 0 || m_low - m_up < kKktTol) break;

    const int i = i_up, j = i_low;
    const double yi = labels[i], yj = labels[j];
    double eta = gram.at(i, i) + gram.at(j, j) - 2.0 * gram.at(i, j);
    if (eta <= 0.0) {
      indefinite = true;
      eta = kEta;
    }
    // step along the equality-feasible direction: a_i += yi*d, a_j -= yj*d
    double d = (m_low - m_up) / eta;
    if (yi > 0) d = std::min(d, C - model.alpha[i]);
    else d = std::min(d, model.alpha[i]);
    if (yj > 0) d = std::min(d, model.alpha[j]);
    else d = std::min(d, C - model.alpha[j]);
    if (d <= 0.0) break;

    model.alpha[i] += yi * d;
    model.alpha[j] -= yj * d;
    // g_t += Q_ti (yi d) - Q_tj (yj d), with Q_ts = y_t y_s K_ts
    for (std::size_t t = 0; t < n; ++t)
      g[t] += labels[t] * d * (gram.at(t, i) - gram.at(t, j));
  }
  model.iterations = iter;
  model.indefinite_kernel = indefinite;

  for (std::size_t i = 0; i < n; ++i) {
    model.alpha[i] = std::clamp(model.alpha[i], 0.0, C);
    if (model.alpha[i] > 1e-12 * C) model.support_ids.push_back(static_cast<int>(i));
  }

  // bias from margin support vectors; fallback to the feasible-interval
  // midpoint when every alpha sits at a bound
  double b_sum = 0.0;
  int b_count = 0;
  double b_lower = -std::numeric_limits<double>::infinity();
  double b_upper = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double raw = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      raw += model.alpha[j] * labels[j] * gram.at(i, j);
    const double implied_b = labels[i] - raw;  // y_i (raw + b) = 1 at margin SVs
    const bool at_zero = model.alpha[i] <= 1e-12 * C;
    const bool at_c = model.alpha[i] >= C - 1e-12 * C;
    if (!at_zero && !at_c) {
      b_sum += implied_b;
      ++b_count;
    }
    const bool in_up = (labels[i] == 1 && !at_c) || (labels[i] == -1 && !at_zero);
    const bool in_low = (labels[i] == 1 && !at_zero) || (labels[i] == -1 && !at_c);
    if (in_up) b_lower = std::max(b_lower, implied_b);
    if (in_low) b_upper = std::min(b_upper, implied_b);
  }
  model.bias = b_count > 0 ? b_sum / b_count : 0.5 * (b_lower + b_upper);
  return model;
}

MarginSelection select_margin_parameter(const Matrix& full_gram,
                                        const std::vector<int>& labels,
                                        const std::vector<int>& train_indices,
                                        const std::vector<int>& eval_indices,
                                        const std::vector<double>& c_grid) {
  if (c_grid.empty()) fail(ErrorCode::BadArgument, "empty C grid");

  std::vector<double> grid = c_grid;
  std::sort(grid.begin(), grid.end());

  Matrix train_gram(train_indices.size(), train_indices.size());
  std::vector<int> train_labels(train_indices.size());
  for (std::size_t i = 0; i < train_indices.size(); ++i) {
    train_labels[i] = labels[train_indices[i]];
    for (std::size_t j = 0; j < train_indices.size(); ++j)
      train_gram.at(i, j) = full_gram.at(train_indices[i], train_indices[j]);
  }

  MarginSelection best;
  bool have_best = false;
  MarginSelection least_bad;
  bool have_least_bad = false;

  for (double C : grid) {
    BinaryModel model = fit_binary(train_gram, train_labels, C);
    int tp = 0, fp = 0;
    std::vector<double> row(train_indices.size());
    for (int e : eval_indices) {
      for (std::size_t j = 0; j < train_indices.size(); ++j)
        row[j] = full_gram.at(e, train_indices[j]);
      const int pred = model.predict(row);
      if (pred == 1) {
        if (labels[e] == 1) ++tp;
        else ++fp;
      }
    }
    if (fp == 0) {
      if (!have_best || tp > best.true_positives) {
        best = {C, true, tp, fp};
        have_best = true;
      }
    }
    if (!have_least_bad || fp < least_bad.false_positives ||
        (fp == least_bad.false_positives && tp > least_bad.true_positives)) {
      least_bad = {C, false, tp, fp};
      have_least_bad = true;
    }
  }
  return have_best ? best : least_bad;
}

}  // namespace hbop
