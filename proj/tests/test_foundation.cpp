#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qshap/errors.hpp"
#include "qshap/numeric.hpp"
#include "qshap/param_expr.hpp"
#include "qshap/rng.hpp"

using namespace qshap;

TEST_CASE("splitmix64 streams are deterministic and label-separated") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(derive_seed(42, 1) != derive_seed(42, 2));
  CHECK(derive_seed(42, "x") != derive_seed(42, "y"));
  CHECK(derive_seed(42, 1, 2) != derive_seed(42, 2, 1));
}

TEST_CASE("splitmix64 uniform and below stay in range") {
  SplitMix64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(13) < 13);
  }
  CHECK(rng.below(1) == 0);
}

TEST_CASE("below covers its range roughly uniformly") {
  SplitMix64 rng(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("pairwise_sum matches plain summation") {
  std::vector<double> xs;
  double expect = 0.0;
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(rng.uniform(-1, 1));
    expect += xs.back();
  }
  CHECK(pairwise_sum(xs) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("binomial coefficients are exact") {
  CHECK(binomial(0, 0) == 1.0);
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(23, 11) == 1352078.0);
  CHECK(binomial(4, 7) == 0.0);
}

TEST_CASE("sample_std uses the n-1 denominator") {
  std::vector<double> xs{1.0, 2.0, 3.0};
  CHECK(sample_std(xs) == doctest::Approx(1.0));
  std::vector<double> single{5.0};
  CHECK(sample_std(single) == 0.0);
}

TEST_CASE("param expressions parse, evaluate and round-trip") {
  const double theta[] = {0.5, -2.0};
  const double x[] = {1.0, 3.0};
  auto eval = [&](const char* text) {
    return ParamExpr::parse(text).eval(std::span(theta, 2), std::span(x, 2));
  };
  CHECK(eval("2*x[0]") == doctest::Approx(2.0));
  CHECK(eval("theta[1] - 1") == doctest::Approx(-3.0));
  CHECK(eval("pi") == doctest::Approx(std::numbers::pi));
  CHECK(eval("-0.5 * (1 + 1)") == doctest::Approx(-1.0));
  CHECK(eval("2*(pi - x[0])*(pi - x[1])") ==
        doctest::Approx(2.0 * (std::numbers::pi - 1.0) * (std::numbers::pi - 3.0)));

  ParamExpr e = ParamExpr::parse("2*(pi - x[0])*(pi - x[1]) + theta[1]");
  ParamExpr round = ParamExpr::parse(e.to_string());
  CHECK(e.eval(std::span(theta, 2), std::span(x, 2)) ==
        doctest::Approx(round.eval(std::span(theta, 2), std::span(x, 2))));
  CHECK(e.max_theta_index() == 1);
  CHECK(e.max_feature_index() == 1);
}

TEST_CASE("the two bundled feature-map expressions are representable") {
  const double x[] = {std::numbers::pi, std::numbers::pi};
  CHECK(ParamExpr::parse("2*x[0]").eval({}, std::span(x, 2)) ==
        doctest::Approx(2 * std::numbers::pi));
  CHECK(ParamExpr::parse("2*(pi - x[0])*(pi - x[1])").eval({}, std::span(x, 2)) ==
        doctest::Approx(0.0));
}

TEST_CASE("param expression errors") {
  CHECK_THROWS_AS(ParamExpr::parse("2 +"), ConfigError);
  CHECK_THROWS_AS(ParamExpr::parse("theta[x]"), ConfigError);
  CHECK_THROWS_AS(ParamExpr::parse("y[0]"), ConfigError);
  CHECK_THROWS_AS(ParamExpr::parse("(1"), ConfigError);
  CHECK_THROWS_AS(ParamExpr::parse("2 / 3"), ConfigError);
  const double x[] = {1.0};
  CHECK_THROWS_AS(ParamExpr::parse("x[4]").eval({}, std::span(x, 1)), ConfigError);
}
