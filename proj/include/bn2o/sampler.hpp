#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bn2o/network.hpp"
#include "bn2o/rng.hpp"

namespace bn2o {

// One benchmark diagnostic problem: the reference diagnosis that generated
// it, the observation vector, and the generative observation model.
struct TestCase {
  int id = 0;
  DiseaseVector d;
  ObservationVector o;
  double p_plus = 0.0;
  double p_minus = 0.0;
  std::uint64_t seed = 0;  // substream seed that produced this case
};

struct BenchmarkSet {
  std::vector<TestCase> cases;
  ObservationModel obsmodel;
  std::string net_hash;
};

struct PriorSample {
  DiseaseVector d;
  std::vector<std::uint8_t> f;  // 1 = positive finding
};

// Joint forward sample (d, f) from the unaugmented network.
PriorSample sample_prior(const Bn2oNetwork& net, Rng& rng);

// Exact sample from P(d | sum_k d_k = count) via the Poisson-binomial
// suffix-tail dynamic program. Throws if the count has zero probability.
DiseaseVector sample_d_given_count(const Bn2oNetwork& net, int count, Rng& rng);

// Clamp d, forward sample f then o per the observation CPT; f is latent and
// discarded.
ObservationVector sample_observation(const Bn2oNetwork& net,
                                     const ObservationModel& om,
                                     const DiseaseVector& d, Rng& rng);

// n_cases independent test cases; case n uses substream derive_seed(seed, n).
BenchmarkSet gen_benchmark(const Bn2oNetwork& net, const ObservationModel& om,
                           int n_cases, int disease_count, std::uint64_t seed);

// Benchmark file format: JSONL, one case per line.
void save_benchmark(const BenchmarkSet& bench, const std::string& path);
BenchmarkSet load_benchmark(const std::string& path, int num_diseases,
                            int num_findings);

}  // namespace bn2o
