#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qshap {

/// C-SVC trained on a precomputed kernel matrix. The solver is a plain
/// sequential-minimal-optimization loop with most-violating-pair selection,
/// lowest-index tie break, fixed tolerance 1e-6 and a fixed iteration cap,
/// so identical inputs give bit-identical models.
struct SvmModel {
  Eigen::VectorXd alpha;      // dual coefficients, 0 <= alpha_i <= C
  std::vector<int> labels;    // training labels in {0, 1}
  double bias = 0.0;          // decision f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  double C = 1.0;
  std::vector<int> support;   // indices with alpha_i > 0
  int iterations = 0;
  bool converged = false;
};

/// Trains on a symmetric kernel matrix (NumericError on non-finite entries).
SvmModel train_svm(const Eigen::MatrixXd& kernel, const std::vector<int>& labels, double C);

/// kernel_row[i] = K(x_train_i, x); ties at exactly zero predict class 1.
double decision_value(const SvmModel& model, const Eigen::VectorXd& kernel_row);
int predict(const SvmModel& model, const Eigen::VectorXd& kernel_row);

/// One prediction per row of `kernel_rows` (tests x train).
std::vector<int> predict_all(const SvmModel& model, const Eigen::MatrixXd& kernel_rows);

}  // namespace qshap
