#pragma once

#include <Eigen/Dense>

#include <vector>

#include "bn2o/network.hpp"

namespace bn2o {

struct ExactPosterior {
  Eigen::VectorXd marginals;  // P(d_k = 1 | evidence)
  double log_evidence = kNegInf;
};

// Brute-force enumeration over all 2^K disease configurations of the
// augmented network; evidence is a full observation vector (POS/NEG/UNK).
ExactPosterior enumerate_posterior(const Bn2oNetwork& net,
                                   const ObservationModel& om,
                                   const ObservationVector& o, int cap = 20);

// Unaugmented variant: evidence is (F+, F-), unobserved findings ignored.
ExactPosterior enumerate_posterior(const Bn2oNetwork& net,
                                   const std::vector<int>& f_plus,
                                   const std::vector<int>& f_minus,
                                   int cap = 20);

// Quickscore: exact P(F+, F-) and posterior marginals on the unaugmented
// network by inclusion-exclusion over subsets of F+; cost O(2^{|F+|}).
// The alternating series can cancel to many digits, so terms and the signed
// accumulation are carried in extended precision with compensated summation.
// Throws if the accumulated total is non-positive.
ExactPosterior quickscore(const Bn2oNetwork& net,
                          const std::vector<int>& f_plus,
                          const std::vector<int>& f_minus, int cap = 18);

}  // namespace bn2o
