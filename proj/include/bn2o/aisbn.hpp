#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "bn2o/network.hpp"
#include "bn2o/rng.hpp"

namespace bn2o {
namespace aisbn {

// Fully factorized importance proposal over diseases, clamped away from
// the {0, 1} boundary.
struct Proposal {
  Eigen::VectorXd p;  // P~(d_k = 1)
};

inline constexpr double kProposalFloor = 1e-6;

struct AisbnConfig {
  long phase1_samples = 25000;  // adaptation phase
  long phase2_samples = 75000;  // estimation phase, proposal fixed
  long update_interval = 2500;
  double lr_a = 0.4;   // learning-rate schedule eta(t) = a (b/a)^{t/t_max}
  double lr_b = 0.14;
  double init_floor = 0.04;
  std::uint64_t seed = 0;
};

// P~(d_k=1) = P(d_k=1) if P(d_k=1) > floor, else floor.
Proposal init_proposal(const Bn2oNetwork& net, double floor = 0.04);

struct WeightedSample {
  DiseaseVector d;
  double weight = 0.0;
};

// d ~ proposal; weight = P(d, F+, F-) / P~(d). Evidence uses unaugmented
// semantics (unobserved findings ignored).
WeightedSample weighted_sample(const Bn2oNetwork& net, const Proposal& proposal,
                               const std::vector<int>& f_plus,
                               const std::vector<int>& f_minus, Rng& rng);

struct AisbnResult {
  Eigen::VectorXd marginals;       // phase-2 self-normalized estimates
  double sum_weights = 0.0;        // phase-2 sum of weights
  double ess = 0.0;                // (sum w)^2 / sum w^2
  double evidence_estimate = 0.0;  // mean phase-2 weight, unbiased for P(e)
  Proposal final_proposal;
};

// Two-phase adaptive importance sampling. Phase 1 re-estimates the
// posterior marginals from the cumulative weighted samples after every
// update_interval draws and moves the proposal toward them; phase 2 keeps
// the proposal fixed and accumulates the estimate. Throws if the phase-2
// weights sum to zero.
AisbnResult run(const Bn2oNetwork& net, const std::vector<int>& f_plus,
                const std::vector<int>& f_minus, const AisbnConfig& cfg);

}  // namespace aisbn
}  // namespace bn2o
