#include "hfscreen/kernel_svm.hpp"

#include <cmath>
#include <limits>

namespace hfscreen {

double rbf_kernel(const SparseVec<double>& x, const SparseVec<double>& z, double gamma) {
  const double d2 = x.squaredNorm() + z.squaredNorm() - 2.0 * x.dot(z);
  return std::exp(-gamma * std::max(d2, 0.0));
}

Eigen::MatrixXd rbf_gram(const SparseRows<double>& x, double gamma) {
  const Eigen::MatrixXd inner = Eigen::MatrixXd(x * x.transpose());
  const Eigen::VectorXd sq = inner.diagonal();
  const Eigen::Index n = inner.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = std::exp(-gamma * std::max(sq(i) + sq(j) - 2.0 * inner(i, j), 0.0));
    }
  }
  return k;
}

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                      const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd ay = alpha.cwiseProduct(targets);
  return alpha.sum() - 0.5 * ay.dot(gram * ay);
}

KernelSvmSolution solve_kernel_svm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& targets,
                                   const Eigen::VectorXd& upper, double tolerance,
                                   long max_iterations, bool record_trace) {
  constexpr double kTau = 1e-12;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = gram.rows();
  const Eigen::VectorXd& y = targets;

  KernelSvmSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd& alpha = sol.alpha;
  // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  auto in_up = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) < upper(t)) || (y(t) < 0 && alpha(t) > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < upper(t));
  };

  for (; sol.iterations < max_iterations; ++sol.iterations) {
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y(t) * grad(t) >= gmax) {
        gmax = -y(t) * grad(t);
        i = t;
      }
    }
    double gmax2 = -kInf;
    double best = kInf;
    Eigen::Index j = -1;
    if (i >= 0) {
      for (Eigen::Index t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        gmax2 = std::max(gmax2, y(t) * grad(t));
        const double b = gmax + y(t) * grad(t);
        if (b > 0) {
          double a = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
          if (a <= 0) a = kTau;
          if (-(b * b) / a <= best) {
            best = -(b * b) / a;
            j = t;
          }
        }
      }
    }
    sol.max_violation = (i < 0) ? 0.0 : gmax + gmax2;
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
      sol.converged = true;
      break;
    }

    const double ci = upper(i);
    const double cj = upper(j);
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double qij = y(i) * y(j) * gram(i, j);
    if (y(i) != y(j)) {
      double quad = gram(i, i) + gram(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > ci - cj) {
        if (alpha(i) > ci) {
          alpha(i) = ci;
          alpha(j) = ci - diff;
        }
      } else if (alpha(j) > cj) {
        alpha(j) = cj;
        alpha(i) = cj + diff;
      }
    } else {
      double quad = gram(i, i) + gram(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > ci) {
        if (alpha(i) > ci) {
          alpha(i) = ci;
          alpha(j) = sum - ci;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > cj) {
        if (alpha(j) > cj) {
          alpha(j) = cj;
          alpha(i) = sum - cj;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double dai = (alpha(i) - old_i) * y(i);
    const double daj = (alpha(j) - old_j) * y(j);
    // grad_t += Q_ti dalpha_i + Q_tj dalpha_j
    grad += (y.array() * (gram.col(i).array() * dai + gram.col(j).array() * daj)).matrix();

    if (record_trace) sol.dual_objective_trace.push_back(0.5 * (alpha.sum() - alpha.dot(grad)));
  }

  double ub = kInf, lb = -kInf, sum_free = 0.0;
  long n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= upper(t)) {
      if (y(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha(t) <= 0) {
      if (y(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho;
  if (n_free > 0) rho = sum_free / static_cast<double>(n_free);
  else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
  else if (std::isfinite(ub)) rho = ub;
  else if (std::isfinite(lb)) rho = lb;
  else rho = 0.0;
  sol.bias = -rho;
  return sol;
}

}  // namespace hfscreen
