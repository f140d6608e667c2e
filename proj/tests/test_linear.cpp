#include <doctest.h>

#include <cmath>

#include "gazescore/errors.hpp"
#include "gazescore/features.hpp"
#include "gazescore/linear.hpp"
#include "gazescore/rng.hpp"
#include "helpers.hpp"

using namespace gazescore;

namespace {

std::vector<std::vector<double>> random_design(Rng& rng, std::size_t n,
                                               std::size_t d) {
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (auto& row : x) {
    for (auto& v : row) v = rng.uniform(-2, 2);
  }
  return x;
}

}  // namespace

TEST_CASE("OLS recovers an exact linear rule") {
  Rng rng(1);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    const double len = 2 + rng.index(9);
    x.push_back({len, rng.uniform(-10, -2), rng.uniform(0, 12)});
    y.push_back(10 + 2 * len);
  }
  const auto fit = features::fit_ols(x, y);
  CHECK(fit.coef[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.coef[1] == doctest::Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(fit.coef[2] == doctest::Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(fit.intercept == doctest::Approx(10.0).epsilon(1e-8));
}

TEST_CASE("OLS on a constant target returns the constant intercept") {
  Rng rng(2);
  auto x = random_design(rng, 20, 3);
  std::vector<double> y(20, 7.5);
  const auto fit = features::fit_ols(x, y);
  for (double b : fit.coef) CHECK(b == doctest::Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(fit.intercept == doctest::Approx(7.5).epsilon(1e-10));
}

TEST_CASE("OLS matches the Gauss-Jordan pseudo-inverse oracle") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 8 + rng.index(40);
    auto x = random_design(rng, n, 3);
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(rng.uniform(-5, 5));
    const auto fit = linear::fit_least_squares(x, y);
    const auto oracle = testutil::ols_oracle(x, y);
    CHECK(fit.intercept == doctest::Approx(oracle[0]).scale(1).epsilon(1e-8));
    for (int j = 0; j < 3; ++j) {
      CHECK(fit.coef[static_cast<std::size_t>(j)] ==
            doctest::Approx(oracle[static_cast<std::size_t>(j) + 1])
                .scale(1)
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("underdetermined OLS is rejected") {
  std::vector<std::vector<double>> x = {{1, 2, 3}, {2, 3, 4}, {0, 1, 0}, {5, 5, 5}};
  std::vector<double> y = {1, 2, 3, 4};
  CHECK_THROWS_WITH_AS(features::fit_ols(x, y),
                       doctest::Contains("underdetermined"), NumericError);
}

TEST_CASE("ridge matches the gradient-descent oracle on small instances") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 10 + rng.index(41);
    const std::size_t d = 1 + rng.index(10);
    auto x = random_design(rng, n, d);
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(rng.uniform(-5, 5));
    const double lambda = std::vector<double>{0.1, 1.0, 10.0}[rep % 3];
    const auto fit = linear::fit_ridge(x, y, lambda);
    const auto oracle = testutil::ridge_oracle(x, y, lambda);
    CHECK(fit.intercept == doctest::Approx(oracle[0]).scale(1).epsilon(1e-6));
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(fit.coef[j] == doctest::Approx(oracle[j + 1]).scale(1).epsilon(1e-6));
    }
  }
}

TEST_CASE("ridge at lambda=0 recovers an exact rule and validates rank") {
  Rng rng(5);
  auto x = random_design(rng, 30, 4);
  std::vector<double> y;
  for (const auto& row : x) y.push_back(3 - 2 * row[0] + 0.5 * row[3]);
  const auto fit = linear::fit_ridge(x, y, 0.0);
  CHECK(fit.coef[0] == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(fit.coef[3] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-6));

  // duplicate column -> rank-deficient at lambda = 0
  auto bad = x;
  for (auto& row : bad) row.push_back(row[0]);
  std::vector<double> yb = y;
  CHECK_THROWS_WITH_AS(linear::fit_ridge(bad, yb, 0.0),
                       doctest::Contains("lambda"), NumericError);
}

TEST_CASE("ridge dual path (d > n) agrees with the oracle") {
  Rng rng(6);
  auto x = random_design(rng, 12, 30);
  std::vector<double> y;
  for (std::size_t i = 0; i < 12; ++i) y.push_back(rng.uniform(-3, 3));
  const auto fit = linear::fit_ridge(x, y, 2.0);
  const auto oracle = testutil::ridge_oracle(x, y, 2.0);
  CHECK(fit.intercept == doctest::Approx(oracle[0]).scale(1).epsilon(1e-6));
  for (std::size_t j = 0; j < 30; ++j) {
    CHECK(fit.coef[j] == doctest::Approx(oracle[j + 1]).scale(1).epsilon(1e-6));
  }
}

TEST_CASE("logistic: exact class-balanced designs give closed-form fits") {
  // every distinct row appears with both labels at a fixed ratio, so the
  // exact MLE is beta = 0, intercept = logit(rate)
  Rng rng(7);
  SUBCASE("balanced 1:1 -> intercept 0") {
    std::vector<std::vector<double>> x;
    std::vector<char> y;
    for (int i = 0; i < 1000; ++i) {
      const auto row = std::vector<double>{rng.uniform(-2, 2), rng.uniform(-2, 2),
                                           rng.uniform(-2, 2)};
      x.push_back(row);
      y.push_back(1);
      x.push_back(row);
      y.push_back(0);
    }
    const auto fit = features::fit_logistic_skip(x, y);
    for (double b : fit.coef) CHECK(b == doctest::Approx(0.0).scale(1).epsilon(1e-3));
    CHECK(fit.intercept == doctest::Approx(0.0).scale(1).epsilon(1e-3));
  }
  SUBCASE("2:1 ratio -> intercept ln 2") {
    std::vector<std::vector<double>> x;
    std::vector<char> y;
    for (int i = 0; i < 700; ++i) {
      const auto row = std::vector<double>{rng.uniform(-2, 2), rng.uniform(-2, 2),
                                           rng.uniform(-2, 2)};
      for (int k = 0; k < 3; ++k) {
        x.push_back(row);
        y.push_back(k < 2 ? 1 : 0);
      }
    }
    const auto fit = features::fit_logistic_skip(x, y);
    for (double b : fit.coef) CHECK(b == doctest::Approx(0.0).scale(1).epsilon(1e-3));
    CHECK(fit.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  }
}

TEST_CASE("logistic recovers sigmoid(-1 + 0.5 length) within 0.1 at n=5000") {
  Rng rng(8);
  std::vector<std::vector<double>> x;
  std::vector<char> y;
  for (int i = 0; i < 5000; ++i) {
    const double len = 2 + rng.index(9);
    x.push_back({len, rng.uniform(-10, -2), rng.uniform(0, 12)});
    const double p = 1.0 / (1.0 + std::exp(-(-1.0 + 0.5 * len)));
    y.push_back(rng.bernoulli(p) ? 1 : 0);
  }
  const auto fit = features::fit_logistic_skip(x, y);
  CHECK(std::fabs(fit.coef[0] - 0.5) < 0.1);
}

TEST_CASE("perfectly separable data converges to finite coefficients") {
  std::vector<std::vector<double>> x;
  std::vector<char> y;
  for (int i = 0; i < 50; ++i) {
    const double v = i < 25 ? -1.0 - i * 0.1 : 1.0 + i * 0.1;
    x.push_back({v, 0.0, 0.0});
    y.push_back(v > 0 ? 1 : 0);
  }
  const auto fit = features::fit_logistic_skip(x, y);
  for (double b : fit.coef) CHECK(std::isfinite(b));
  CHECK(std::isfinite(fit.intercept));
}

TEST_CASE("single-class data raises a degenerate-pattern error") {
  std::vector<std::vector<double>> x = {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  std::vector<char> y = {1, 1, 1};
  CHECK_THROWS_WITH_AS(features::fit_logistic_skip(x, y),
                       doctest::Contains("degenerate"), NumericError);
}
