#ifndef GALILEO_LIE_NUMERIC_JACOBIAN_HPP
#define GALILEO_LIE_NUMERIC_JACOBIAN_HPP

#include <Eigen/LU>

#include "galileo/common.hpp"

namespace galileo {

inline constexpr double kJacobianStep = 1e-6;

/// Right Jacobian by column-wise central differences of Log(Exp(tau)^-1 Exp(tau +- h e_i)).
template <int Dim, typename ExpFn, typename LogFn>
Eigen::Matrix<double, Dim, Dim> numeric_right_jacobian(const Eigen::Matrix<double, Dim, 1>& tau,
                                                       ExpFn&& exp_fn, LogFn&& log_fn,
                                                       double h = kJacobianStep) {
  using Tangent = Eigen::Matrix<double, Dim, 1>;
  const auto base_inv = exp_fn(tau).inverse();
  Eigen::Matrix<double, Dim, Dim> jac;
  for (int i = 0; i < Dim; ++i) {
    Tangent step = Tangent::Zero();
    step[i] = h;
    const Tangent fwd = log_fn(base_inv * exp_fn(Tangent(tau + step)));
    const Tangent bwd = log_fn(base_inv * exp_fn(Tangent(tau - step)));
    jac.col(i) = (fwd - bwd) / (2.0 * h);
  }
  return jac;
}

/// Inverse with a conditioning gate; near-singular right Jacobians mark the principal-domain edge.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> checked_inverse(const Eigen::Matrix<double, Dim, Dim>& m,
                                                double min_rcond = 1e-10) {
  Eigen::FullPivLU<Eigen::Matrix<double, Dim, Dim>> lu(m);
  if (!lu.isInvertible() || lu.rcond() < min_rcond) {
    throw ConditioningError("right Jacobian is singular near the principal-domain boundary");
  }
  return lu.inverse();
}

}  // namespace galileo

#endif  // GALILEO_LIE_NUMERIC_JACOBIAN_HPP
