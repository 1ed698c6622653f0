#include "bn2o/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bn2o/io.hpp"

namespace bn2o {

using nlohmann::json;

PriorSample sample_prior(const Bn2oNetwork& net, Rng& rng) {
  PriorSample s;
  s.d.resize(net.num_diseases);
  for (int k = 0; k < net.num_diseases; ++k)
    s.d[k] = rng.bernoulli(net.prior[k]) ? 1 : 0;
  s.f.resize(net.num_findings);
  for (int i = 0; i < net.num_findings; ++i) {
    const double p_neg = std::exp(log_p_finding_neg(net, i, s.d));
    s.f[i] = rng.bernoulli(p_neg) ? 0 : 1;
  }
  return s;
}

DiseaseVector sample_d_given_count(const Bn2oNetwork& net, int count, Rng& rng) {
  const int K = net.num_diseases;
  if (count < 0 || count > K)
    throw std::invalid_argument("disease count outside [0, K]");
  // tail[k * (count+1) + s] = P(sum_{j >= k} d_j = s)
  const int m = count;
  std::vector<double> tail(static_cast<std::size_t>(K + 1) * (m + 1), 0.0);
  tail[static_cast<std::size_t>(K) * (m + 1) + 0] = 1.0;
  for (int k = K - 1; k >= 0; --k) {
    const double p = net.prior[k];
    for (int s = 0; s <= m; ++s) {
      double v = (1.0 - p) * tail[static_cast<std::size_t>(k + 1) * (m + 1) + s];
      if (s > 0) v += p * tail[static_cast<std::size_t>(k + 1) * (m + 1) + s - 1];
      tail[static_cast<std::size_t>(k) * (m + 1) + s] = v;
    }
  }
  if (tail[m] <= 0.0)
    throw std::runtime_error("conditioned disease count has zero probability");

  DiseaseVector d(K, 0);
  int remaining = m;
  for (int k = 0; k < K && remaining > 0; ++k) {
    const double denom = tail[static_cast<std::size_t>(k) * (m + 1) + remaining];
    const double num =
        net.prior[k] * tail[static_cast<std::size_t>(k + 1) * (m + 1) + remaining - 1];
    if (rng.bernoulli(num / denom)) {
      d[k] = 1;
      --remaining;
    }
  }
  return d;
}

ObservationVector sample_observation(const Bn2oNetwork& net,
                                     const ObservationModel& om,
                                     const DiseaseVector& d, Rng& rng) {
  std::vector<Obs> states(net.num_findings);
  for (int i = 0; i < net.num_findings; ++i) {
    const double p_neg = std::exp(log_p_finding_neg(net, i, d));
    const bool f_pos = !rng.bernoulli(p_neg);
    const double p_hide = f_pos ? om.p_plus : om.p_minus;
    if (rng.bernoulli(p_hide))
      states[i] = Obs::kUnk;
    else
      states[i] = f_pos ? Obs::kPos : Obs::kNeg;
  }
  return ObservationVector::from_states(std::move(states));
}

BenchmarkSet gen_benchmark(const Bn2oNetwork& net, const ObservationModel& om,
                           int n_cases, int disease_count, std::uint64_t seed) {
  if (n_cases < 0) throw std::invalid_argument("n_cases must be >= 0");
  BenchmarkSet bench;
  bench.obsmodel = om;
  bench.net_hash = fnv1a64_hex(network_to_json(net));
  bench.cases.reserve(n_cases);
  for (int n = 0; n < n_cases; ++n) {
    const std::uint64_t sub = derive_seed(seed, static_cast<std::uint64_t>(n));
    Rng rng(sub);
    TestCase tc;
    tc.id = n;
    tc.seed = sub;
    tc.d = sample_d_given_count(net, disease_count, rng);
    tc.o = sample_observation(net, om, tc.d, rng);
    tc.p_plus = om.p_plus;
    tc.p_minus = om.p_minus;
    bench.cases.push_back(std::move(tc));
  }
  return bench;
}

void save_benchmark(const BenchmarkSet& bench, const std::string& path) {
  std::string out;
  for (const auto& tc : bench.cases) {
    json line;
    std::vector<int> active;
    for (int k = 0; k < static_cast<int>(tc.d.size()); ++k)
      if (tc.d[k]) active.push_back(k);
    line["id"] = tc.id;
    line["d"] = active;
    line["pos"] = tc.o.pos;
    line["neg"] = tc.o.neg;
    line["p_plus"] = tc.p_plus;
    line["p_minus"] = tc.p_minus;
    out += line.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

BenchmarkSet load_benchmark(const std::string& path, int num_diseases,
                            int num_findings) {
  BenchmarkSet bench;
  std::istringstream in(read_file(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json doc = json::parse(line);
    TestCase tc;
    tc.id = doc.at("id").get<int>();
    tc.d.assign(num_diseases, 0);
    for (int k : doc.at("d").get<std::vector<int>>()) {
      if (k < 0 || k >= num_diseases)
        throw std::runtime_error("benchmark disease index out of range");
      tc.d[k] = 1;
    }
    tc.o = ObservationVector::from_index_sets(
        num_findings, doc.at("pos").get<std::vector<int>>(),
        doc.at("neg").get<std::vector<int>>());
    tc.p_plus = doc.at("p_plus").get<double>();
    tc.p_minus = doc.at("p_minus").get<double>();
    if (first) {
      bench.obsmodel = ObservationModel{tc.p_plus, tc.p_minus};
      first = false;
    } else if (tc.p_plus != bench.obsmodel.p_plus ||
               tc.p_minus != bench.obsmodel.p_minus) {
      throw std::runtime_error("benchmark cases disagree on (p_plus, p_minus)");
    }
    bench.cases.push_back(std::move(tc));
  }
  return bench;
}

}  // namespace bn2o
