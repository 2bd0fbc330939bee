#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "hfscreen/features.hpp"
#include "hfscreen/models.hpp"

namespace hfscreen {

template <typename Scalar>
Scalar logistic_loss(Scalar margin) {
  // log(1 + exp(-m)) without overflow
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

template <typename Scalar>
Scalar logistic_loss_derivative(Scalar margin) {
  // d/dm log(1 + exp(-m)) = -1 / (1 + exp(m))
  if (margin > 0) {
    const Scalar e = std::exp(-margin);
    return -e / (1 + e);
  }
  return -1 / (1 + std::exp(margin));
}

template <typename Scalar>
Scalar hinge_loss(Scalar margin) {
  return margin < 1 ? 1 - margin : Scalar(0);
}

// Subgradient; 0 is taken at the kink.
template <typename Scalar>
Scalar hinge_loss_derivative(Scalar margin) {
  return margin < 1 ? Scalar(-1) : Scalar(0);
}

/// Binary weighted L2-regularized linear objective over parameters
/// theta = [w; b]:
///   lambda/2 |theta|^2 + sum_i s_i loss(y_i (w.x_i + b)),  y_i in {-1, +1}.
template <typename Scalar>
class WeightedLinearObjective {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  WeightedLinearObjective(const SparseRows<Scalar>& x, const Vector& targets,
                          const Vector& sample_weights, Scalar lambda, LinearLoss loss)
      : x_(x), targets_(targets), weights_(sample_weights), lambda_(lambda), loss_(loss) {}

  Eigen::Index dimension() const { return x_.cols() + 1; }

  Vector margins(const Vector& theta) const {
    const auto d = x_.cols();
    Vector m = x_ * theta.head(d);
    m.array() += theta(d);
    return m.cwiseProduct(targets_);
  }

  Scalar value(const Vector& theta) const {
    const Vector m = margins(theta);
    Scalar data = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      data += weights_(i) * (loss_ == LinearLoss::Logistic ? logistic_loss(m(i)) : hinge_loss(m(i)));
    }
    return lambda_ / 2 * theta.squaredNorm() + data;
  }

  Vector gradient(const Vector& theta) const {
    const Vector m = margins(theta);
    Vector coef(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const Scalar dl = loss_ == LinearLoss::Logistic ? logistic_loss_derivative(m(i))
                                                      : hinge_loss_derivative(m(i));
      coef(i) = weights_(i) * dl * targets_(i);
    }
    const auto d = x_.cols();
    Vector g(d + 1);
    g.head(d) = x_.transpose() * coef;
    g(d) = coef.sum();
    g += lambda_ * theta;
    return g;
  }

 private:
  const SparseRows<Scalar>& x_;
  const Vector& targets_;
  const Vector& weights_;
  Scalar lambda_;
  LinearLoss loss_;
};

}  // namespace hfscreen
