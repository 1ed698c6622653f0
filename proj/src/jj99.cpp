#include "bn2o/jj99.hpp"

#include <cmath>
#include <stdexcept>

#include "bn2o/logprob.hpp"

namespace bn2o {
namespace jj99 {

double conjugate_fstar(double xi) {
  if (xi <= 0.0) throw std::domain_error("conjugate_fstar: xi must be > 0");
  return (1.0 + xi) * std::log1p(xi) - xi * std::log(xi);
}

namespace {

// Per-case constants: the negative-evidence theta mass per disease, the
// negative leak total, and prior log-odds.
struct CaseContext {
  const Bn2oNetwork* net;
  const std::vector<int>* f_plus;
  Eigen::VectorXd s_neg;          // -sum_{j in F-} theta_{jk}, length K
  double theta0_neg = 0.0;        // sum_{j in F-} theta_{j0}
  Eigen::VectorXd prior_log_odds; // length K

  CaseContext(const Bn2oNetwork& n, const std::vector<int>& fp,
              const std::vector<int>& fm)
      : net(&n), f_plus(&fp) {
    s_neg = Eigen::VectorXd::Zero(n.num_diseases);
    for (int j : fm) {
      theta0_neg += n.theta0[j];
      const auto& par = n.parents[j];
      for (std::size_t t = 0; t < par.size(); ++t)
        s_neg[par[t]] -= n.theta[j][t];
    }
    prior_log_odds.resize(n.num_diseases);
    for (int k = 0; k < n.num_diseases; ++k)
      prior_log_odds[k] = std::log(n.prior[k]) - std::log1p(-n.prior[k]);
  }

  // s_k = sum_{i in F+} xi_i theta_{ik} - sum_{j in F-} theta_{jk}
  Eigen::VectorXd evidence_mass(const Eigen::VectorXd& xi) const {
    Eigen::VectorXd s = s_neg;
    for (std::size_t idx = 0; idx < f_plus->size(); ++idx) {
      const int i = (*f_plus)[idx];
      const auto& par = net->parents[i];
      for (std::size_t t = 0; t < par.size(); ++t)
        s[par[t]] += xi[idx] * net->theta[i][t];
    }
    return s;
  }

  double bound(const Eigen::VectorXd& xi) const {
    double b = -theta0_neg;
    for (std::size_t idx = 0; idx < f_plus->size(); ++idx)
      b += xi[idx] * net->theta0[(*f_plus)[idx]] - conjugate_fstar(xi[idx]);
    const Eigen::VectorXd s = evidence_mass(xi);
    for (int k = 0; k < net->num_diseases; ++k)
      b += log_add(std::log1p(-net->prior[k]), std::log(net->prior[k]) + s[k]);
    return b;
  }

  // dB/deta_i at xi = e^eta:
  //   xi_i [theta_{i0} - ln((1+xi_i)/xi_i) + sum_k sigma(p_k + s_k) theta_{ik}]
  Eigen::VectorXd grad_eta(const Eigen::VectorXd& xi) const {
    const Eigen::VectorXd s = evidence_mass(xi);
    Eigen::VectorXd post(net->num_diseases);
    for (int k = 0; k < net->num_diseases; ++k)
      post[k] = sigmoid(prior_log_odds[k] + s[k]);
    Eigen::VectorXd g(f_plus->size());
    for (std::size_t idx = 0; idx < f_plus->size(); ++idx) {
      const int i = (*f_plus)[idx];
      double di = net->theta0[i] - (std::log1p(xi[idx]) - std::log(xi[idx]));
      const auto& par = net->parents[i];
      for (std::size_t t = 0; t < par.size(); ++t)
        di += post[par[t]] * net->theta[i][t];
      g[idx] = xi[idx] * di;
    }
    return g;
  }
};

}  // namespace

double bound_log(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                 const std::vector<int>& f_minus, const Eigen::VectorXd& xi) {
  if (xi.size() != static_cast<Eigen::Index>(f_plus.size()))
    throw std::invalid_argument("bound_log: xi size != |F+|");
  for (Eigen::Index i = 0; i < xi.size(); ++i)
    if (!(xi[i] > 0.0)) throw std::domain_error("bound_log: xi must be > 0");
  return CaseContext(net, f_plus, f_minus).bound(xi);
}

Eigen::VectorXd posterior_log_odds(const Bn2oNetwork& net,
                                   const Eigen::VectorXd& xi,
                                   const std::vector<int>& f_plus,
                                   const std::vector<int>& f_minus) {
  const CaseContext ctx(net, f_plus, f_minus);
  return ctx.prior_log_odds + ctx.evidence_mass(xi);
}

VariationalState optimize(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                          const std::vector<int>& f_minus, double tol,
                          int max_iter) {
  const int n = static_cast<int>(f_plus.size());
  const CaseContext ctx(net, f_plus, f_minus);
  VariationalState st;
  st.prior_log_odds = ctx.prior_log_odds;

  if (n == 0) {
    // No transformed factors: the product form is exact.
    st.xi.resize(0);
    st.log_bound = ctx.bound(st.xi);
    st.log_odds = ctx.prior_log_odds + ctx.s_neg;
    return st;
  }

  // Work in eta = ln(xi); positivity is then unconstrained, and the bound
  // is convex in xi, so the stationary point is the global minimum.
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd xi = eta.array().exp().matrix();
  double bound = ctx.bound(xi);
  double step = 1.0;
  int iter = 0;
  bool converged = false;
  Eigen::VectorXd grad;
  for (; iter < max_iter; ++iter) {
    grad = ctx.grad_eta(xi);
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) {
      converged = true;
      break;
    }
    double new_bound = bound;
    Eigen::VectorXd new_eta;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      new_eta = eta - step * grad;
      new_bound = ctx.bound(new_eta.array().exp().matrix());
      if (new_bound <= bound - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable descent step; numerically stationary.
      converged = true;
      break;
    }
    eta = new_eta;
    xi = eta.array().exp().matrix();
    step = std::min(step * 2.0, 1e4);
    const double change = bound - new_bound;
    bound = new_bound;
    if (change <= tol * std::max(1.0, std::abs(bound))) {
      converged = true;
      ++iter;
      break;
    }
  }

  st.xi = xi;
  st.log_bound = bound;
  st.log_odds = ctx.prior_log_odds + ctx.evidence_mass(xi);
  st.iterations = iter;
  st.converged = converged;
  st.grad_norm = grad.size() ? grad.norm() : 0.0;
  return st;
}

}  // namespace jj99
}  // namespace bn2o
