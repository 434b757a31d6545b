#include "qshap/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qshap/errors.hpp"

namespace qshap {

namespace {
constexpr double kTolerance = 1e-6;
constexpr int kIterationCap = 100000;
}  // namespace

SvmModel train_svm(const Eigen::MatrixXd& kernel, const std::vector<int>& labels, double C) {
  const int n = static_cast<int>(labels.size());
  if (kernel.rows() != n || kernel.cols() != n)
    throw ConfigError("svm: kernel matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  if (n < 1) throw ConfigError("svm: empty training set");
  if (!(C > 0.0)) throw ConfigError("svm: C must be positive");
  if (!kernel.allFinite()) throw NumericError("svm: kernel matrix has non-finite entries");
  for (int label : labels)
    if (label != 0 && label != 1) throw ConfigError("svm: labels must be 0 or 1");

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

  // Dual problem: min 1/2 a^T Q a - e^T a with Q_ij = y_i y_j K_ij,
  // 0 <= a <= C, y^T a = 0. Gradient G = Q a - e. The working pair is the
  // most violating one; -y_t G_t equals the bias on free support vectors.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  SvmModel model;
  model.C = C;
  model.labels = labels;

  double up = 0.0, down = 0.0;
  int iter = 0;
  for (; iter < kIterationCap; ++iter) {
    int i = -1, j = -1;
    up = -std::numeric_limits<double>::infinity();
    down = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const bool in_up = (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
      const bool in_down = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
      const double score = -y[t] * grad[t];
      if (in_up && score > up) {
        up = score;
        i = t;
      }
      if (in_down && score < down) {
        down = score;
        j = t;
      }
    }
    if (i < 0 || j < 0 || up - down <= kTolerance) {
      model.converged = true;
      break;
    }

    double quad = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    if (quad <= 1e-12) quad = 1e-12;
    double step = (up - down) / quad;
    const double room_i = y[i] > 0 ? C - alpha[i] : alpha[i];
    const double room_j = y[j] > 0 ? alpha[j] : C - alpha[j];
    step = std::min({step, room_i, room_j});

    const double delta_i = y[i] * step;
    const double delta_j = -y[j] * step;
    alpha[i] += delta_i;
    alpha[j] += delta_j;
    alpha[i] = std::clamp(alpha[i], 0.0, C);
    alpha[j] = std::clamp(alpha[j], 0.0, C);
    for (int t = 0; t < n; ++t)
      grad[t] += y[t] * (kernel(t, i) * y[i] * delta_i + kernel(t, j) * y[j] * delta_j);
  }

  model.iterations = iter;
  model.alpha = alpha;
  model.bias = std::isfinite(up) && std::isfinite(down) ? (up + down) / 2.0 : 0.0;
  for (int t = 0; t < n; ++t)
    if (alpha[t] > 0.0) model.support.push_back(t);
  return model;
}

double decision_value(const SvmModel& model, const Eigen::VectorXd& kernel_row) {
  const int n = static_cast<int>(model.labels.size());
  if (kernel_row.size() != n) throw ConfigError("svm: kernel row length mismatch");
  double f = model.bias;
  for (int i = 0; i < n; ++i) {
    if (model.alpha[i] == 0.0) continue;
    f += model.alpha[i] * (model.labels[i] == 1 ? 1.0 : -1.0) * kernel_row[i];
  }
  return f;
}

int predict(const SvmModel& model, const Eigen::VectorXd& kernel_row) {
  return decision_value(model, kernel_row) >= 0.0 ? 1 : 0;
}

std::vector<int> predict_all(const SvmModel& model, const Eigen::MatrixXd& kernel_rows) {
  std::vector<int> out(kernel_rows.rows());
  for (Eigen::Index r = 0; r < kernel_rows.rows(); ++r)
    out[r] = predict(model, kernel_rows.row(r).transpose());
  return out;
}

}  // namespace qshap
