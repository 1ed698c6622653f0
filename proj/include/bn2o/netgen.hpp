#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bn2o/network.hpp"

namespace bn2o {

// Generation settings for synthetic QMR-DT-like networks. Defaults follow
// the published QMR-DT statistics (sizes, prior/leak ranges, the five-point
// strength set, mean disease degree).
struct NetGenConfig {
  int num_diseases = 600;
  int num_findings = 4000;
  double prior_lo = 2e-5;
  double prior_hi = 2e-2;
  double leak_lo = 5.8e-8;
  double leak_hi = 0.153;
  std::vector<double> strengths = {0.025, 0.2, 0.5, 0.8, 0.985};
  int mean_degree = 70;        // findings per disease
  int degree_half_width = 35;  // degree ~ uniform int on mean +/- half_width
  std::uint64_t seed = 0;

  static NetGenConfig paper() { return NetGenConfig{}; }
  // Desk-scale preset: 10x smaller layers at the same edge density.
  static NetGenConfig desk() {
    NetGenConfig c;
    c.num_diseases = 60;
    c.num_findings = 400;
    return c;
  }

  std::string to_json() const;
  static NetGenConfig from_json(const std::string& text);
};

// Deterministic in (cfg, cfg.seed). Priors and leaks are log-uniform on
// their ranges, disease degrees uniform integers, finding partners drawn
// without replacement, strengths uniform over the strength set. A repair
// pass attaches any parentless finding to one random disease.
Bn2oNetwork generate(const NetGenConfig& cfg);

struct NetStats {
  int num_diseases = 0;
  int num_findings = 0;
  int parentless_findings = 0;
  int disease_degree_min = 0, disease_degree_max = 0;
  double disease_degree_mean = 0;
  int finding_parents_min = 0, finding_parents_max = 0;
  double finding_parents_mean = 0;
  double prior_min = 0, prior_max = 0;
  double leak_min = 0, leak_max = 0;
  // Expected positive findings caused by one active disease, sum_i q_{ik}
  // averaged over k.
  double mean_sum_q_per_disease = 0;
  std::vector<std::pair<double, long>> strength_counts;  // (q value, count)

  std::string to_json() const;
};

NetStats stats(const Bn2oNetwork& net);

}  // namespace bn2o
