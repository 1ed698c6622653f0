#include "bn2o/netgen.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "bn2o/rng.hpp"

namespace bn2o {

using nlohmann::json;

std::string NetGenConfig::to_json() const {
  json doc;
  doc["K"] = num_diseases;
  doc["I"] = num_findings;
  doc["prior"] = {prior_lo, prior_hi};
  doc["leak"] = {leak_lo, leak_hi};
  doc["strengths"] = strengths;
  doc["mean_degree"] = mean_degree;
  doc["degree_half_width"] = degree_half_width;
  return doc.dump();
}

NetGenConfig NetGenConfig::from_json(const std::string& text) {
  const json doc = json::parse(text);
  NetGenConfig c;
  c.num_diseases = doc.value("K", c.num_diseases);
  c.num_findings = doc.value("I", c.num_findings);
  if (doc.contains("prior")) {
    c.prior_lo = doc["prior"].at(0).get<double>();
    c.prior_hi = doc["prior"].at(1).get<double>();
  }
  if (doc.contains("leak")) {
    c.leak_lo = doc["leak"].at(0).get<double>();
    c.leak_hi = doc["leak"].at(1).get<double>();
  }
  if (doc.contains("strengths")) c.strengths = doc["strengths"].get<std::vector<double>>();
  c.mean_degree = doc.value("mean_degree", c.mean_degree);
  c.degree_half_width = doc.value("degree_half_width", c.degree_half_width);
  return c;
}

namespace {

void check_config(const NetGenConfig& cfg) {
  if (cfg.num_diseases < 1 || cfg.num_findings < 1)
    throw std::invalid_argument("netgen: K and I must be >= 1");
  if (!(cfg.prior_lo > 0.0 && cfg.prior_lo <= cfg.prior_hi && cfg.prior_hi < 1.0))
    throw std::invalid_argument("netgen: invalid prior range");
  if (!(cfg.leak_lo > 0.0 && cfg.leak_lo <= cfg.leak_hi && cfg.leak_hi < 1.0))
    throw std::invalid_argument("netgen: invalid leak range");
  if (cfg.strengths.empty())
    throw std::invalid_argument("netgen: empty strength set");
  for (double s : cfg.strengths)
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("netgen: strength outside (0,1)");
  if (cfg.mean_degree - cfg.degree_half_width < 1)
    throw std::invalid_argument("netgen: minimum degree below 1");
  if (cfg.mean_degree + cfg.degree_half_width > cfg.num_findings)
    throw std::invalid_argument("netgen: maximum degree exceeds I");
}

}  // namespace

Bn2oNetwork generate(const NetGenConfig& cfg) {
  check_config(cfg);
  Rng rng(cfg.seed);
  const int K = cfg.num_diseases, I = cfg.num_findings;

  Bn2oNetwork net;
  net.num_diseases = K;
  net.num_findings = I;
  net.seed = cfg.seed;
  net.generator = "bn2o-netgen 0.1.0";

  net.prior.resize(K);
  for (int k = 0; k < K; ++k) net.prior[k] = rng.log_uniform(cfg.prior_lo, cfg.prior_hi);
  net.leak.resize(I);
  for (int i = 0; i < I; ++i) net.leak[i] = rng.log_uniform(cfg.leak_lo, cfg.leak_hi);

  // Disease-major draw, findings are accumulated per finding. Iterating k in
  // ascending order keeps each finding's parent list sorted for free.
  std::vector<std::vector<int>> parents(I);
  std::vector<std::vector<double>> qs(I);
  std::vector<int> pool(I);
  const int ns = static_cast<int>(cfg.strengths.size());
  for (int k = 0; k < K; ++k) {
    const int degree = static_cast<int>(rng.uniform_int(
        cfg.mean_degree - cfg.degree_half_width,
        cfg.mean_degree + cfg.degree_half_width));
    // partial Fisher-Yates for `degree` distinct findings
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < degree; ++j) {
      const int pick = static_cast<int>(rng.uniform_int(j, I - 1));
      std::swap(pool[j], pool[pick]);
      const int i = pool[j];
      parents[i].push_back(k);
      qs[i].push_back(cfg.strengths[rng.uniform_int(0, ns - 1)]);
    }
  }

  // Repair: attach any parentless finding to one uniform random disease.
  for (int i = 0; i < I; ++i) {
    if (parents[i].empty()) {
      parents[i].push_back(static_cast<int>(rng.uniform_int(0, K - 1)));
      qs[i].push_back(cfg.strengths[rng.uniform_int(0, ns - 1)]);
    }
  }

  net.parents = std::move(parents);
  net.q.resize(I);
  for (int i = 0; i < I; ++i)
    net.q[i] = Eigen::Map<const Eigen::VectorXd>(qs[i].data(), qs[i].size());
  net.rebuild_theta();

  const auto violations = validate(net);
  if (!violations.empty())
    throw std::logic_error("netgen: generated network invalid: " + violations.front());
  return net;
}

NetStats stats(const Bn2oNetwork& net) {
  NetStats s;
  s.num_diseases = net.num_diseases;
  s.num_findings = net.num_findings;
  s.prior_min = net.prior.minCoeff();
  s.prior_max = net.prior.maxCoeff();
  s.leak_min = net.leak.minCoeff();
  s.leak_max = net.leak.maxCoeff();

  std::vector<long> degree(net.num_diseases, 0);
  Eigen::VectorXd sum_q = Eigen::VectorXd::Zero(net.num_diseases);
  std::map<double, long> counts;
  long total_edges = 0;
  int fp_min = net.num_findings > 0 ? INT_MAX : 0, fp_max = 0;
  for (int i = 0; i < net.num_findings; ++i) {
    const int np = static_cast<int>(net.parents[i].size());
    if (np == 0) ++s.parentless_findings;
    fp_min = std::min(fp_min, np);
    fp_max = std::max(fp_max, np);
    total_edges += np;
    for (std::size_t j = 0; j < net.parents[i].size(); ++j) {
      ++degree[net.parents[i][j]];
      sum_q[net.parents[i][j]] += net.q[i][j];
      ++counts[net.q[i][j]];
    }
  }
  s.finding_parents_min = fp_min;
  s.finding_parents_max = fp_max;
  s.finding_parents_mean =
      static_cast<double>(total_edges) / std::max(1, net.num_findings);
  const auto [dmin, dmax] = std::minmax_element(degree.begin(), degree.end());
  s.disease_degree_min = static_cast<int>(*dmin);
  s.disease_degree_max = static_cast<int>(*dmax);
  s.disease_degree_mean =
      static_cast<double>(total_edges) / std::max(1, net.num_diseases);
  s.mean_sum_q_per_disease = sum_q.mean();
  for (const auto& [val, n] : counts) s.strength_counts.emplace_back(val, n);
  return s;
}

std::string NetStats::to_json() const {
  json doc;
  doc["K"] = num_diseases;
  doc["I"] = num_findings;
  doc["parentless_findings"] = parentless_findings;
  doc["disease_degree"] = {{"min", disease_degree_min},
                           {"max", disease_degree_max},
                           {"mean", disease_degree_mean}};
  doc["finding_parents"] = {{"min", finding_parents_min},
                            {"max", finding_parents_max},
                            {"mean", finding_parents_mean}};
  doc["prior"] = {{"min", prior_min}, {"max", prior_max}};
  doc["leak"] = {{"min", leak_min}, {"max", leak_max}};
  doc["mean_sum_q_per_disease"] = mean_sum_q_per_disease;
  json sc = json::array();
  for (const auto& [val, n] : strength_counts) sc.push_back({{"q", val}, {"count", n}});
  doc["strength_counts"] = std::move(sc);
  return doc.dump();
}

}  // namespace bn2o
