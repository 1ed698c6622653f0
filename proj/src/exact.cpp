#include "bn2o/exact.hpp"

#include <quadmath.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "bn2o/logprob.hpp"

namespace bn2o {

namespace {

// Shared enumeration core: log_term(d) must return ln[P(d) * P(evidence | d)].
template <typename LogTerm>
ExactPosterior enumerate_impl(const Bn2oNetwork& net, int cap, LogTerm&& log_term) {
  const int K = net.num_diseases;
  if (K > cap)
    throw std::invalid_argument("enumerate_posterior: K exceeds cap (" +
                                std::to_string(cap) + ")");
  const std::uint64_t n_cfg = std::uint64_t{1} << K;
  std::vector<double> lp(n_cfg);
  DiseaseVector d(K, 0);
  double hi = kNegInf;
  for (std::uint64_t c = 0; c < n_cfg; ++c) {
    for (int k = 0; k < K; ++k) d[k] = (c >> k) & 1;
    lp[c] = log_term(d);
    if (lp[c] > hi) hi = lp[c];
  }
  if (hi == kNegInf)
    throw std::runtime_error("enumerate_posterior: evidence has probability 0");

  CompensatedSum total;
  std::vector<CompensatedSum> per_k(K);
  for (std::uint64_t c = 0; c < n_cfg; ++c) {
    if (lp[c] == kNegInf) continue;
    const double w = std::exp(lp[c] - hi);
    total.add(w);
    for (int k = 0; k < K; ++k)
      if ((c >> k) & 1) per_k[k].add(w);
  }
  ExactPosterior post;
  post.log_evidence = hi + std::log(total.value());
  post.marginals.resize(K);
  for (int k = 0; k < K; ++k)
    post.marginals[k] = per_k[k].value() / total.value();
  return post;
}

void check_index_sets(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                      const std::vector<int>& f_minus) {
  std::set<int> seen;
  for (int i : f_plus) {
    if (i < 0 || i >= net.num_findings)
      throw std::out_of_range("finding index out of range");
    if (!seen.insert(i).second)
      throw std::invalid_argument("duplicate finding in evidence sets");
  }
  for (int i : f_minus) {
    if (i < 0 || i >= net.num_findings)
      throw std::out_of_range("finding index out of range");
    if (!seen.insert(i).second)
      throw std::invalid_argument("duplicate finding in evidence sets");
  }
}

}  // namespace

ExactPosterior enumerate_posterior(const Bn2oNetwork& net,
                                   const ObservationModel& om,
                                   const ObservationVector& o, int cap) {
  if (o.size() != net.num_findings)
    throw std::invalid_argument("observation vector length mismatch");
  return enumerate_impl(net, cap, [&](const DiseaseVector& d) {
    return log_joint(net, om, d, o);
  });
}

ExactPosterior enumerate_posterior(const Bn2oNetwork& net,
                                   const std::vector<int>& f_plus,
                                   const std::vector<int>& f_minus, int cap) {
  check_index_sets(net, f_plus, f_minus);
  return enumerate_impl(net, cap, [&](const DiseaseVector& d) {
    double lp = 0.0;
    for (int k = 0; k < net.num_diseases; ++k)
      lp += d[k] ? std::log(net.prior[k]) : std::log1p(-net.prior[k]);
    for (int i : f_minus) lp += log_p_finding_neg(net, i, d);
    for (int i : f_plus) {
      lp += log1mexp(-log_p_finding_neg(net, i, d));
      if (lp == kNegInf) return kNegInf;
    }
    return lp;
  });
}

namespace {

using quad = __float128;

struct QuadCompensated {
  quad sum = 0, comp = 0;
  void add(quad v) {
    const quad t = sum + v;
    if (fabsq(sum) >= fabsq(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  quad value() const { return sum + comp; }
};

}  // namespace

ExactPosterior quickscore(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                          const std::vector<int>& f_minus, int cap) {
  check_index_sets(net, f_plus, f_minus);
  const int n = static_cast<int>(f_plus.size());
  if (n > cap)
    throw std::invalid_argument("quickscore: |F+| exceeds cap (" +
                                std::to_string(cap) + ")");
  const int K = net.num_diseases;

  // Per-disease theta mass from the negative set, and the set of diseases
  // touched by any evidence finding; untouched diseases keep their prior.
  std::vector<quad> b_neg(K, 0);
  quad theta0_neg = 0;
  std::vector<char> touched(K, 0);
  for (int j : f_minus) {
    theta0_neg += quad(net.theta0[j]);
    const auto& par = net.parents[j];
    for (std::size_t t = 0; t < par.size(); ++t) {
      b_neg[par[t]] += quad(net.theta[j][t]);
      touched[par[t]] = 1;
    }
  }
  for (int i : f_plus)
    for (int k : net.parents[i]) touched[k] = 1;
  std::vector<int> active;
  for (int k = 0; k < K; ++k)
    if (touched[k]) active.push_back(k);

  // Bracket_k(S) = P(d_k=0) + P(d_k=1) e^{-b_neg_k - S}; precompute the
  // S = 0 value so subsets only pay for diseases they actually touch.
  const int na = static_cast<int>(active.size());
  std::vector<quad> ln_bracket_base(na), p1(na), p0(na);
  quad base_sum = 0;
  for (int t = 0; t < na; ++t) {
    p1[t] = quad(net.prior[active[t]]);
    p0[t] = quad(1.0) - p1[t];
    ln_bracket_base[t] = logq(p0[t] + p1[t] * expq(-b_neg[active[t]]));
    base_sum += ln_bracket_base[t];
  }
  std::vector<int> slot(K, -1);  // disease -> active slot
  for (int t = 0; t < na; ++t) slot[active[t]] = t;

  // ln t(F') for subset F' of F+, exact per subset (no incremental drift):
  //   -theta0(F-) - theta0(F') + base_sum
  //   + sum_{t touched by F'} [ln bracket(S_t) - ln bracket(0)]
  std::vector<quad> s_extra(na, 0);
  std::vector<int> touched_slots;
  touched_slots.reserve(64);
  const std::uint64_t n_sub = std::uint64_t{1} << n;

  auto subset_log_term = [&](std::uint64_t mask, std::vector<int>* slots_out,
                             std::vector<quad>* s_out) {
    quad lt = -theta0_neg + base_sum;
    touched_slots.clear();
    for (int b = 0; b < n; ++b) {
      if (!((mask >> b) & 1)) continue;
      const int i = f_plus[b];
      lt -= quad(net.theta0[i]);
      const auto& par = net.parents[i];
      for (std::size_t t = 0; t < par.size(); ++t) {
        const int sl = slot[par[t]];
        if (s_extra[sl] == 0) touched_slots.push_back(sl);
        s_extra[sl] += quad(net.theta[i][t]);
      }
    }
    for (int sl : touched_slots)
      lt += logq(p0[sl] + p1[sl] * expq(-b_neg[active[sl]] - s_extra[sl])) -
            ln_bracket_base[sl];
    if (slots_out) *slots_out = touched_slots;
    if (s_out)
      for (int sl : touched_slots) (*s_out)[sl] = s_extra[sl];
    for (int sl : touched_slots) s_extra[sl] = 0;
    return lt;
  };

  quad max_lt = subset_log_term(0, nullptr, nullptr);
  for (std::uint64_t m = 1; m < n_sub; ++m) {
    const quad lt = subset_log_term(m, nullptr, nullptr);
    if (lt > max_lt) max_lt = lt;
  }

  QuadCompensated total_pos, total_neg;
  std::vector<QuadCompensated> marg_pos(na), marg_neg(na);
  std::vector<int> slots;
  std::vector<quad> s_vals(na, 0);
  for (std::uint64_t m = 0; m < n_sub; ++m) {
    std::fill(s_vals.begin(), s_vals.end(), quad(0));
    const quad lt = subset_log_term(m, &slots, &s_vals);
    const quad w = expq(lt - max_lt);
    const bool negative = std::popcount(m) & 1;
    (negative ? total_neg : total_pos).add(w);
    // Clamping d_k = 1 replaces bracket_k by p1 e^{-tot}; accumulate the
    // clamped sums through the ratio to the unclamped bracket.
    for (int t = 0; t < na; ++t) {
      const quad tot = b_neg[active[t]] + s_vals[t];
      const quad e = expq(-tot);
      const quad r = p1[t] * e / (p0[t] + p1[t] * e);
      (negative ? marg_neg[t] : marg_pos[t]).add(w * r);
    }
  }

  const quad total = total_pos.value() - total_neg.value();
  if (!(total > 0))
    throw std::runtime_error(
        "quickscore: inclusion-exclusion total non-positive "
        "(catastrophic cancellation)");

  ExactPosterior post;
  post.log_evidence = static_cast<double>(max_lt + logq(total));
  post.marginals.resize(K);
  for (int k = 0; k < K; ++k) post.marginals[k] = net.prior[k];
  for (int t = 0; t < na; ++t) {
    const quad m = (marg_pos[t].value() - marg_neg[t].value()) / total;
    double md = static_cast<double>(m);
    if (md < -1e-9 || md > 1.0 + 1e-9)
      throw std::runtime_error("quickscore: marginal outside [0,1] "
                               "(catastrophic cancellation)");
    post.marginals[active[t]] = std::clamp(md, 0.0, 1.0);
  }
  return post;
}

}  // namespace bn2o
