#include <doctest.h>

#include <cmath>

#include "qshap/errors.hpp"
#include "qshap/svm.hpp"

using namespace qshap;

TEST_CASE("linearly separable points train to zero error") {
  // 1-d points -2, -1, 1, 2 with a linear kernel
  Eigen::VectorXd xs(4);
  xs << -2, -1, 1, 2;
  std::vector<int> labels{0, 0, 1, 1};
  Eigen::MatrixXd kernel = xs * xs.transpose();
  SvmModel model = train_svm(kernel, labels, 10.0);
  CHECK(model.converged);
  for (int i = 0; i < 4; ++i) CHECK(predict(model, kernel.row(i).transpose()) == labels[i]);
  // the margin points are the support vectors
  CHECK(model.alpha[1] > 0.0);
  CHECK(model.alpha[2] > 0.0);
}

TEST_CASE("training twice gives bit-identical models") {
  Eigen::MatrixXd kernel(6, 6);
  std::vector<int> labels{0, 1, 0, 1, 1, 0};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) kernel(i, j) = std::cos(0.7 * (i - j)) * std::cos(0.3 * (i + j));
  for (int i = 0; i < 6; ++i) kernel(i, i) = 1.0;
  SvmModel a = train_svm(kernel, labels, 1.0);
  SvmModel b = train_svm(kernel, labels, 1.0);
  CHECK(a.bias == b.bias);
  CHECK(a.iterations == b.iterations);
  for (int i = 0; i < 6; ++i) CHECK(a.alpha[i] == b.alpha[i]);
}

TEST_CASE("constant kernels predict one class") {
  // all points identical in feature space: the decision is constant, so a
  // balanced test set scores one half
  const int n = 8;
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Ones(n, n);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) labels.push_back(i % 2);
  SvmModel model = train_svm(kernel, labels, 1.0);
  Eigen::MatrixXd rows = Eigen::MatrixXd::Ones(n, n);
  std::vector<int> predictions = predict_all(model, rows);
  for (int i = 1; i < n; ++i) CHECK(predictions[i] == predictions[0]);
  int correct = 0;
  for (int i = 0; i < n; ++i) correct += predictions[i] == labels[i];
  CHECK(correct * 2 == n);
}

TEST_CASE("dual feasibility holds after training") {
  Eigen::MatrixXd kernel(5, 5);
  std::vector<int> labels{1, 0, 1, 0, 1};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) kernel(i, j) = std::exp(-0.5 * (i - j) * (i - j));
  const double C = 0.75;
  SvmModel model = train_svm(kernel, labels, C);
  double balance = 0.0;
  for (int i = 0; i < 5; ++i) {
    CHECK(model.alpha[i] >= 0.0);
    CHECK(model.alpha[i] <= C);
    balance += model.alpha[i] * (labels[i] == 1 ? 1.0 : -1.0);
  }
  CHECK(balance == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("svm input validation") {
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(train_svm(kernel, {0, 1, 1}, 1.0), ConfigError);
  CHECK_THROWS_AS(train_svm(kernel, {0, 2}, 1.0), ConfigError);
  CHECK_THROWS_AS(train_svm(kernel, {0, 1}, -1.0), ConfigError);
  kernel(0, 1) = std::nan("");
  CHECK_THROWS_AS(train_svm(kernel, {0, 1}, 1.0), NumericError);
}
