#include <cmath>
#include <numbers>

#include "cvmesh/error.hpp"
#include "cvmesh/optimize.hpp"
#include "doctest.h"

using namespace cvmesh::opt;

namespace {

Box square(double lo, double hi, std::size_t n) {
  return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

}  // namespace

TEST_CASE("rosenbrock_minimize on a quadratic bowl") {
  auto f = [](std::span<const double> x) {
    return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2);
  };
  auto r = rosenbrock_minimize(f, {0.0, 0.0}, square(-10, 10, 2));
  CHECK(r.converged);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(r.x[1] - 2.0) < 1e-6);
}

TEST_CASE("rosenbrock_minimize on the banana function") {
  auto f = [](std::span<const double> x) {
    return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  };
  auto r = rosenbrock_minimize(f, {-1.2, 1.0}, square(-5, 5, 2));
  CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
  CHECK(r.value <= f(std::vector<double>{-1.2, 1.0}));
}

TEST_CASE("rosenbrock_minimize never increases the objective and respects bounds") {
  // Unconstrained minimum at (3, 3) lies outside the box.
  auto f = [](std::span<const double> x) {
    return (x[0] - 3) * (x[0] - 3) + (x[1] - 3) * (x[1] - 3);
  };
  Box b = square(0, 1, 2);
  auto r = rosenbrock_minimize(f, {0.5, 0.5}, b);
  CHECK(b.contains(r.x));
  CHECK(r.value <= f(std::vector<double>{0.5, 0.5}));
  CHECK(r.x[0] > 0.999);
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] <= r.trace[k - 1]);
}

TEST_CASE("rosenbrock_minimize reports exhausted budgets as non-converged") {
  auto f = [](std::span<const double> x) {
    return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  };
  RosenbrockParams p;
  p.max_evals = 50;
  auto r = rosenbrock_minimize(f, {-1.2, 1.0}, square(-5, 5, 2), p);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations == 50);
}

TEST_CASE("rosenbrock_minimize rejects start points outside the box") {
  auto f = [](std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(rosenbrock_minimize(f, {2.0}, square(0, 1, 1)), cvmesh::Error);
}

TEST_CASE("soft_selection_minimize on a 10-d sphere") {
  auto f = [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += (v - 0.3) * (v - 0.3);
    return s;
  };
  auto r = soft_selection_minimize(f, square(-2, 2, 10), 42);
  CHECK(r.value < 1e-6);
}

TEST_CASE("soft_selection_minimize best-of-population is monotone on Rastrigin") {
  auto f = [](std::span<const double> x) {
    double s = 20.0;
    for (double v : x) s += v * v - 10 * std::cos(2 * std::numbers::pi * v);
    return s;
  };
  SoftSelectionParams p;
  p.polish = false;
  auto r = soft_selection_minimize(f, square(-5.12, 5.12, 2), 3, p);
  REQUIRE(r.trace.size() == static_cast<std::size_t>(p.generations));
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] <= r.trace[k - 1]);
  CHECK(r.trace.back() < r.trace.front());
}

TEST_CASE("soft_selection_minimize is bit-identical for the same seed") {
  auto f = [](std::span<const double> x) {
    return std::sin(3 * x[0]) + (x[1] - 0.2) * (x[1] - 0.2) + 0.1 * x[0] * x[0];
  };
  auto a = soft_selection_minimize(f, square(-3, 3, 2), 99);
  auto b = soft_selection_minimize(f, square(-3, 3, 2), 99);
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);
  auto c = soft_selection_minimize(f, square(-3, 3, 2), 100);
  CHECK(c.trace != a.trace);
}

TEST_CASE("Rng streams are fixed across platforms") {
  // mt19937_64 is fully specified; the first output for seed 7 is known.
  std::mt19937_64 ref(7);
  Rng rng(7);
  const double u = rng.uniform();
  CHECK(u == static_cast<double>(ref() >> 11) * 0x1.0p-53);
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
}
