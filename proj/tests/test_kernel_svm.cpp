#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hfscreen/kernel_svm.hpp"
#include "hfscreen/rng.hpp"

using namespace hfscreen;

namespace {

struct Problem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd y;
  Eigen::VectorXd upper;
};

Problem random_problem(std::uint64_t seed, int n, double gamma) {
  Rng rng(seed);
  std::vector<std::vector<double>> pts;
  Problem p;
  p.y.resize(n);
  p.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 3 == 0;
    const double shift = pos ? 0.6 : 0.0;
    pts.push_back({rng.uniform() + shift, rng.uniform() + shift, rng.uniform()});
    p.y(i) = pos ? 1.0 : -1.0;
    p.upper(i) = pos ? 2.0 : 1.0;
  }
  p.gram = rbf_gram(testing::matrix(pts).rows, gamma);
  return p;
}

}  // namespace

TEST_CASE("rbf kernel values") {
  const auto x = testing::matrix({{1, 0}, {0, 1}, {1, 0}});
  const Eigen::MatrixXd k = rbf_gram(x.rows, 0.5);
  CHECK(k(0, 0) == doctest::Approx(1.0));
  CHECK(k(0, 2) == doctest::Approx(1.0));
  CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(k(1, 0) == k(0, 1));
  CHECK(rbf_kernel(testing::row_vector(x, 0).counts, testing::row_vector(x, 1).counts, 0.5) ==
        doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("SMO dual objective never decreases") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Problem p = random_problem(seed, 40, 1.5);
    const auto sol = solve_kernel_svm(p.gram, p.y, p.upper, 1e-4, 100000, true);
    REQUIRE(sol.dual_objective_trace.size() > 1);
    for (std::size_t t = 1; t < sol.dual_objective_trace.size(); ++t) {
      CHECK(sol.dual_objective_trace[t] >= sol.dual_objective_trace[t - 1] - 1e-12);
    }
    CHECK(sol.dual_objective_trace.back() == doctest::Approx(dual_objective(p.gram, p.y, sol.alpha)));
  }
}

TEST_CASE("SMO solution is feasible and satisfies KKT") {
  const double tol = 1e-4;
  const Problem p = random_problem(5, 50, 2.0);
  const auto sol = solve_kernel_svm(p.gram, p.y, p.upper, tol, 100000);
  REQUIRE(sol.converged);
  CHECK(std::abs(sol.alpha.dot(p.y)) < 1e-9);
  for (int i = 0; i < 50; ++i) {
    CHECK(sol.alpha(i) >= 0.0);
    CHECK(sol.alpha(i) <= p.upper(i) + 1e-12);
  }
  // decision f(x_i) = sum_j alpha_j y_j K_ij + b, checked against the margin conditions
  const Eigen::VectorXd f = p.gram * sol.alpha.cwiseProduct(p.y) + Eigen::VectorXd::Constant(50, sol.bias);
  for (int i = 0; i < 50; ++i) {
    const double m = p.y(i) * f(i);
    const double eps = 1e-6;
    if (sol.alpha(i) <= eps) CHECK(m >= 1 - 2 * tol);
    else if (sol.alpha(i) >= p.upper(i) - eps) CHECK(m <= 1 + 2 * tol);
    else CHECK(m == doctest::Approx(1.0).epsilon(2 * tol));
  }
  CHECK(sol.max_violation < tol);
}

TEST_CASE("SMO reports non-convergence when the iteration cap is hit") {
  const Problem p = random_problem(9, 40, 1.0);
  const auto sol = solve_kernel_svm(p.gram, p.y, p.upper, 1e-8, 2);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
}
