#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "mifo/error.hpp"
#include "mifo/forest.hpp"
#include "oracles.hpp"

using namespace mifo;

namespace {

struct Problem {
  Matrix x;
  Vector y;
};

Problem linear_problem(std::size_t n, std::size_t p, std::uint64_t seed, double noise = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Problem pr{Matrix(n, p), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0;
    for (std::size_t j = 0; j < p; ++j) {
      pr.x(i, j) = normal(rng);
      y += static_cast<double>(j + 1) * pr.x(i, j);
    }
    pr.y(i) = y + noise * normal(rng);
  }
  return pr;
}

Problem step_problem() {
  Problem pr{Matrix(20, 1), Vector(20)};
  for (int i = 0; i < 20; ++i) {
    pr.x(i, 0) = i + 1;
    pr.y(i) = i + 1 <= 10 ? 0.0 : 10.0;
  }
  return pr;
}

}  // namespace

TEST_CASE("constant response predicts the constant everywhere") {
  auto pr = linear_problem(30, 3, 1);
  pr.y.setConstant(7.0);
  ForestParams params;
  params.ntree = 20;
  const auto forest = fit_forest(pr.x, pr.y, params);
  for (const auto& tree : forest.trees()) {
    REQUIRE(tree.nodes().size() == 1);
    CHECK(tree.nodes()[0].value == 7.0);
  }
  const Vector pred = predict_forest(forest, pr.x);
  for (Eigen::Index i = 0; i < pred.size(); ++i) CHECK(pred(i) == 7.0);
  REQUIRE(forest.oob_mse.has_value());
  CHECK(*forest.oob_mse == 0.0);
}

TEST_CASE("step function is recovered") {
  const auto pr = step_problem();
  ForestParams params;
  params.ntree = 50;
  params.seed = 3;
  const auto forest = fit_forest(pr.x, pr.y, params);
  Matrix probe(2, 1);
  probe << 5, 15;
  const Vector pred = predict_forest(forest, probe);
  CHECK(pred(0) >= 0.0);
  CHECK(pred(0) <= 2.0);
  CHECK(pred(1) >= 8.0);
  CHECK(pred(1) <= 10.0);
}

TEST_CASE("single unbootstrapped tree matches the exhaustive CART oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 10);
    const std::size_t n = 40;
    Matrix x(n, 1);
    Vector y(n);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = std::round(u(rng) * 4) / 4;  // some duplicated x values
      y(i) = std::sin(x(i, 0)) + 0.1 * u(rng);
      xs.push_back(x(i, 0));
      ys.push_back(y(i));
    }
    for (std::size_t min_node : {1u, 3u, 5u}) {
      ForestParams params;
      params.ntree = 1;
      params.bootstrap = false;
      params.min_node_size = min_node;
      const auto forest = fit_forest(x, y, params);
      const oracle::Cart1D cart(xs, ys, min_node);
      Matrix probe(101, 1);
      for (int k = 0; k <= 100; ++k) probe(k, 0) = k * 0.1;
      const Vector pred = predict_forest(forest, probe);
      for (int k = 0; k <= 100; ++k) CHECK(pred(k) == doctest::Approx(cart.predict(k * 0.1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-row tree reproduces its training rows") {
  Matrix x(2, 1);
  x << 0.0, 1.0;
  Vector y(2);
  y << 3.0, 5.0;
  ForestParams params;
  params.ntree = 1;
  params.mtry = 1;
  params.min_node_size = 1;
  params.bootstrap = false;
  const Vector pred = predict_forest(fit_forest(x, y, params), x);
  CHECK(pred(0) == 3.0);
  CHECK(pred(1) == 5.0);
}

TEST_CASE("fit is deterministic across runs and thread counts") {
  const auto pr = linear_problem(80, 4, 5);
  ForestParams params;
  params.ntree = 30;
  params.seed = 17;
  const auto probe = linear_problem(25, 4, 6).x;
  const Vector a = predict_forest(fit_forest(pr.x, pr.y, params), probe);
  const Vector b = predict_forest(fit_forest(pr.x, pr.y, params), probe);
  params.threads = 4;
  const auto forest4 = fit_forest(pr.x, pr.y, params);
  const Vector c = predict_forest(forest4, probe);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(a(i)) == std::bit_cast<std::uint64_t>(b(i)));
    CHECK(std::bit_cast<std::uint64_t>(a(i)) == std::bit_cast<std::uint64_t>(c(i)));
  }
  params.threads = 1;
  CHECK(*fit_forest(pr.x, pr.y, params).oob_mse == *forest4.oob_mse);
}

TEST_CASE("predictions are bounded by the training responses") {
  const auto pr = linear_problem(60, 3, 8);
  ForestParams params;
  params.ntree = 25;
  const auto forest = fit_forest(pr.x, pr.y, params);
  Matrix far = linear_problem(50, 3, 9).x * 10.0;
  const Vector pred = predict_forest(forest, far);
  CHECK(pred.minCoeff() >= pr.y.minCoeff());
  CHECK(pred.maxCoeff() <= pr.y.maxCoeff());
}

TEST_CASE("tree structure invariants") {
  const auto pr = linear_problem(50, 3, 10);
  ForestParams params;
  params.ntree = 10;
  params.min_node_size = 3;
  const auto forest = fit_forest(pr.x, pr.y, params);
  for (const auto& tree : forest.trees()) {
    const auto& nodes = tree.nodes();
    std::vector<double> sum(nodes.size(), 0.0);
    std::vector<double> count(nodes.size(), 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
      for (std::uint32_t k = 0; k < tree.in_bag_counts()[i]; ++k) {
        std::uint32_t n = 0;
        while (true) {
          sum[n] += pr.y(i);
          count[n] += 1;
          if (nodes[n].is_leaf()) break;
          n = pr.x(i, nodes[n].split_col) <= nodes[n].value ? nodes[n].left : nodes[n].right;
        }
      }
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (nodes[n].is_leaf()) {
        CHECK(nodes[n].value == doctest::Approx(sum[n] / count[n]).epsilon(1e-12));
        CHECK(count[n] >= 1);
      } else {
        CHECK(count[nodes[n].left] >= 1);
        CHECK(count[nodes[n].right] >= 1);
        CHECK(count[n] > params.min_node_size);
      }
    }
  }
}

TEST_CASE("mtry = 1 examines exactly one candidate per split") {
  const auto pr = linear_problem(60, 5, 11);
  ForestParams params;
  params.ntree = 10;
  params.mtry = 1;
  const auto forest = fit_forest(pr.x, pr.y, params);
  std::size_t internal = 0;
  for (const auto& tree : forest.trees())
    for (const auto& node : tree.nodes())
      if (!node.is_leaf()) {
        CHECK(node.candidates == 1);
        ++internal;
      }
  CHECK(internal > 0);
}

TEST_CASE("default mtry is floor(sqrt(p))") {
  ForestParams params;
  CHECK(params.resolve_mtry(1) == 1);
  CHECK(params.resolve_mtry(19) == 4);
  CHECK(params.resolve_mtry(253) == 15);
  params.mtry = 6;
  CHECK_THROWS_AS(params.resolve_mtry(5), ParameterError);
  params.mtry = 0;
  CHECK_THROWS_AS(params.resolve_mtry(5), ParameterError);
}

TEST_CASE("out-of-bag rows are the rows absent from the bootstrap multiset") {
  const auto pr = linear_problem(100, 2, 12);
  ForestParams params;
  params.ntree = 1;
  params.seed = 21;
  const auto forest = fit_forest(pr.x, pr.y, params);
  const auto& counts = forest.trees()[0].in_bag_counts();
  const auto preds = oob_predictions(forest, pr.x);
  std::size_t total = 0;
  std::size_t oob = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    total += counts[i];
    CHECK(preds[i].has_value() == (counts[i] == 0));
    oob += counts[i] == 0;
  }
  CHECK(total == 100);
  CHECK(oob > 0);

  // Across many trees the OOB share approaches (1 - 1/n)^n ~ 0.366.
  params.ntree = 400;
  const auto big = fit_forest(pr.x, pr.y, params);
  double share = 0;
  for (const auto& t : big.trees())
    for (auto c : t.in_bag_counts()) share += c == 0;
  share /= 400.0 * 100.0;
  CHECK(share == doctest::Approx(std::pow(1 - 1.0 / 100, 100)).epsilon(0.03));
}

TEST_CASE("every row in bag everywhere yields no OOB estimate") {
  const auto pr = linear_problem(10, 2, 13);
  ForestParams params;
  params.ntree = 3;
  params.bootstrap = false;
  const auto forest = fit_forest(pr.x, pr.y, params);
  CHECK_FALSE(forest.oob_mse.has_value());
  CHECK_FALSE(oob_error(forest, pr.x, pr.y).has_value());
}

TEST_CASE("OOB error tracks held-out error") {
  const auto train = linear_problem(200, 5, 14);
  const auto test = linear_problem(200, 5, 15);
  ForestParams params;
  params.ntree = 100;
  params.seed = 2;
  const auto forest = fit_forest(train.x, train.y, params);
  const double oob = *oob_error(forest, train.x, train.y);
  const Vector pred = predict_forest(forest, test.x);
  const double test_mse = (pred - test.y).squaredNorm() / 200.0;
  CHECK(oob / test_mse < 2.0);
  CHECK(test_mse / oob < 2.0);
  CHECK(oob == *forest.oob_mse);
}

TEST_CASE("ensemble variance at a probe point shrinks with more trees") {
  const auto pr = linear_problem(100, 4, 16, 2.0);
  Matrix probe = Matrix::Zero(1, 4);
  auto spread = [&](std::size_t ntree) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 10; ++s) {
      ForestParams params;
      params.ntree = ntree;
      params.seed = 1000 + s;
      v.push_back(predict_forest(fit_forest(pr.x, pr.y, params), probe)(0));
    }
    double m = 0;
    for (double a : v) m += a;
    m /= v.size();
    double var = 0;
    for (double a : v) var += (a - m) * (a - m);
    return var / v.size();
  };
  CHECK(spread(100) <= spread(10));
}

TEST_CASE("input validation") {
  const auto pr = linear_problem(10, 2, 17);
  ForestParams params;
  params.ntree = 2;
  CHECK_THROWS_AS(fit_forest(Matrix(0, 2), Vector(0), params), DataError);
  Vector bad = pr.y;
  bad(3) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(fit_forest(pr.x, bad, params), DataError);
  CHECK_THROWS_AS(fit_forest(pr.x, Vector(4), params), DataError);
  const auto forest = fit_forest(pr.x, pr.y, params);
  CHECK_THROWS_AS(predict_forest(forest, Matrix::Zero(3, 3)), DataError);
  Matrix nan_row = Matrix::Zero(1, 2);
  nan_row(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(predict_forest(forest, nan_row), DataError);
  params.ntree = 0;
  CHECK_THROWS_AS(fit_forest(pr.x, pr.y, params), ParameterError);
}
