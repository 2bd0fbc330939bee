#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hfscreen/features.hpp"

namespace hfscreen {

double rbf_kernel(const SparseVec<double>& x, const SparseVec<double>& z, double gamma);

// K_ij = exp(-gamma |x_i - x_j|^2).
Eigen::MatrixXd rbf_gram(const SparseRows<double>& x, double gamma);

struct KernelSvmSolution {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  bool converged = false;
  long iterations = 0;
  // Largest KKT violation m(alpha) - M(alpha) at exit.
  double max_violation = 0.0;
  // Dual objective sum(alpha) - 1/2 alpha'Qalpha after each iteration, when
  // requested.
  std::vector<double> dual_objective_trace;
};

/// Soft-margin SVM dual by SMO with maximal-violating-pair selection:
///   max sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
///   s.t. sum(alpha_i y_i) = 0, 0 <= alpha_i <= upper_i.
/// Stops once the KKT violation is below `tolerance`.
KernelSvmSolution solve_kernel_svm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                                   const Eigen::VectorXd& upper, double tolerance,
                                   long max_iterations, bool record_trace = false);

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                      const Eigen::VectorXd& alpha);

}  // namespace hfscreen
