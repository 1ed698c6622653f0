#pragma once

#include <Eigen/Dense>

#include <vector>

#include "bn2o/network.hpp"

namespace bn2o {
namespace jj99 {

struct VariationalState {
  Eigen::VectorXd xi;         // one per positive finding, aligned with F+
  double log_bound = 0.0;     // ln B(xi) >= ln P(F+, F-)
  Eigen::VectorXd log_odds;   // approximate posterior log-odds, length K
  Eigen::VectorXd prior_log_odds;
  int iterations = 0;
  bool converged = true;
  double grad_norm = 0.0;
};

// Conjugate of f(x) = ln(1 - e^{-x}): f*(xi) = (1+xi) ln(1+xi) - xi ln xi.
double conjugate_fstar(double xi);

// Log upper bound on P(F+, F-):
//   sum_{i in F+} [xi_i theta_{i0} - f*(xi_i)] - sum_{j in F-} theta_{j0}
//   + sum_k ln[(1 - P_k) + P_k e^{s_k}]
// with s_k = sum_{i in F+} xi_i theta_{ik} - sum_{j in F-} theta_{jk}.
// Requires xi > 0 elementwise.
double bound_log(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                 const std::vector<int>& f_minus, const Eigen::VectorXd& xi);

// Gradient descent with backtracking line search over eta = ln(xi); the
// bound is convex in xi, so the unique stationary point is the global
// minimum. Stops when the relative bound change drops below tol.
VariationalState optimize(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                          const std::vector<int>& f_minus, double tol = 1e-8,
                          int max_iter = 500);

// l_hat_k = p_k + sum_{i in F+} xi_i theta_{ik} - sum_{j in F-} theta_{jk}.
Eigen::VectorXd posterior_log_odds(const Bn2oNetwork& net,
                                   const Eigen::VectorXd& xi,
                                   const std::vector<int>& f_plus,
                                   const std::vector<int>& f_minus);

}  // namespace jj99
}  // namespace bn2o
