#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bn2o/logprob.hpp"

namespace bn2o {

// Disease configuration d, one byte per disease, entries in {0, 1}.
using DiseaseVector = std::vector<std::uint8_t>;

enum class Obs : std::uint8_t { kNeg = 0, kPos = 1, kUnk = 2 };

// Selection-bias parameters of the observation layer:
//   P(o = ? | f = +) = p_plus,  P(o = ? | f = -) = p_minus.
// Only the ratio p_plus / p_minus affects the posterior over diseases.
struct ObservationModel {
  double p_plus = 0.5;
  double p_minus = 1.0;
  double bias_ratio() const { return p_plus / p_minus; }
};

// Observation vector o over all findings, with cached index sets of the
// positive (F+) and negative (F-) entries.
struct ObservationVector {
  std::vector<Obs> state;
  std::vector<int> pos;
  std::vector<int> neg;

  static ObservationVector from_states(std::vector<Obs> states);
  static ObservationVector from_index_sets(int num_findings,
                                           std::vector<int> pos,
                                           std::vector<int> neg);
  int size() const { return static_cast<int>(state.size()); }
};

// Binary two-layer noisy-OR network: K independent binary diseases on top,
// I conditionally independent binary findings below. Edge strengths are kept
// both as cause probabilities q and as log-domain theta = -ln(1 - q); theta
// is what every probability computation uses, q is retained for
// probability-domain cross-checks and for the on-disk format.
struct Bn2oNetwork {
  int num_diseases = 0;  // K
  int num_findings = 0;  // I

  Eigen::VectorXd prior;   // P(d_k = 1), length K
  Eigen::VectorXd leak;    // q_{i0}, length I
  Eigen::VectorXd theta0;  // -ln(1 - q_{i0}), length I

  // Per finding, aligned: parent disease indices (sorted ascending),
  // strengths q, and theta.
  std::vector<std::vector<int>> parents;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> theta;

  std::uint64_t seed = 0;  // generator metadata
  std::string generator;

  // Recompute theta0/theta from leak/q.
  void rebuild_theta();
};

// ln P(f_i = - | d) = -theta_{i0} - sum_{k in parents(i)} theta_{ik} d_k.
double log_p_finding_neg(const Bn2oNetwork& net, int finding,
                         const DiseaseVector& d);

// ln P(o_i | d) with f_i marginalized out per the observation CPT.
double log_p_obs_given_d(const Bn2oNetwork& net, const ObservationModel& om,
                         int finding, Obs o, const DiseaseVector& d);

// ln P(d, o) over the augmented network. kNegInf is absorbing.
double log_joint(const Bn2oNetwork& net, const ObservationModel& om,
                 const DiseaseVector& d, const ObservationVector& o);

// Invariant check; returns human-readable violations, empty when valid.
std::vector<std::string> validate(const Bn2oNetwork& net);

// Network file format: single JSON document; theta is recomputed on load,
// never stored.
std::string network_to_json(const Bn2oNetwork& net);
Bn2oNetwork network_from_json(const std::string& text);
void save_network(const Bn2oNetwork& net, const std::string& path);
Bn2oNetwork load_network(const std::string& path);

}  // namespace bn2o
