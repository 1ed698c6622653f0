#include "bn2o/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bn2o/io.hpp"

namespace bn2o {

using nlohmann::json;

ObservationVector ObservationVector::from_states(std::vector<Obs> states) {
  ObservationVector o;
  o.state = std::move(states);
  for (int i = 0; i < static_cast<int>(o.state.size()); ++i) {
    if (o.state[i] == Obs::kPos) o.pos.push_back(i);
    if (o.state[i] == Obs::kNeg) o.neg.push_back(i);
  }
  return o;
}

ObservationVector ObservationVector::from_index_sets(int num_findings,
                                                     std::vector<int> pos,
                                                     std::vector<int> neg) {
  ObservationVector o;
  o.state.assign(num_findings, Obs::kUnk);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  for (int i : pos) {
    if (i < 0 || i >= num_findings)
      throw std::out_of_range("positive finding index out of range");
    o.state[i] = Obs::kPos;
  }
  for (int i : neg) {
    if (i < 0 || i >= num_findings)
      throw std::out_of_range("negative finding index out of range");
    if (o.state[i] == Obs::kPos)
      throw std::invalid_argument("finding listed both positive and negative");
    o.state[i] = Obs::kNeg;
  }
  o.pos = std::move(pos);
  o.neg = std::move(neg);
  return o;
}

void Bn2oNetwork::rebuild_theta() {
  theta0.resize(leak.size());
  for (Eigen::Index i = 0; i < leak.size(); ++i) theta0[i] = -std::log1p(-leak[i]);
  theta.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    theta[i].resize(q[i].size());
    for (Eigen::Index j = 0; j < q[i].size(); ++j)
      theta[i][j] = -std::log1p(-q[i][j]);
  }
}

double log_p_finding_neg(const Bn2oNetwork& net, int finding,
                         const DiseaseVector& d) {
  if (finding < 0 || finding >= net.num_findings)
    throw std::out_of_range("finding index out of range");
  if (static_cast<int>(d.size()) != net.num_diseases)
    throw std::invalid_argument("disease vector length mismatch");
  double x = net.theta0[finding];
  const auto& par = net.parents[finding];
  const auto& th = net.theta[finding];
  for (std::size_t j = 0; j < par.size(); ++j)
    if (d[par[j]]) x += th[j];
  return -x;
}

double log_p_obs_given_d(const Bn2oNetwork& net, const ObservationModel& om,
                         int finding, Obs o, const DiseaseVector& d) {
  const double log_neg = log_p_finding_neg(net, finding, d);  // ln P(f=-|d)
  const double log_pos = log1mexp(-log_neg);                  // ln P(f=+|d)
  switch (o) {
    case Obs::kUnk:
      // ln(p+ P(f=+|d) + p- P(f=-|d))
      return log_add(om.p_plus <= 0.0 ? kNegInf : std::log(om.p_plus) + log_pos,
                     om.p_minus <= 0.0 ? kNegInf : std::log(om.p_minus) + log_neg);
    case Obs::kPos:
      return om.p_plus >= 1.0 ? kNegInf : std::log1p(-om.p_plus) + log_pos;
    case Obs::kNeg:
      return om.p_minus >= 1.0 ? kNegInf : std::log1p(-om.p_minus) + log_neg;
  }
  throw std::invalid_argument("invalid observation state");
}

double log_joint(const Bn2oNetwork& net, const ObservationModel& om,
                 const DiseaseVector& d, const ObservationVector& o) {
  if (static_cast<int>(d.size()) != net.num_diseases ||
      o.size() != net.num_findings)
    throw std::invalid_argument("dimension mismatch in log_joint");
  double lp = 0.0;
  for (int k = 0; k < net.num_diseases; ++k)
    lp += d[k] ? std::log(net.prior[k]) : std::log1p(-net.prior[k]);
  for (int i = 0; i < net.num_findings; ++i) {
    lp += log_p_obs_given_d(net, om, i, o.state[i], d);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

std::vector<std::string> validate(const Bn2oNetwork& net) {
  std::vector<std::string> v;
  auto fail = [&v](const std::string& msg) { v.push_back(msg); };

  const int K = net.num_diseases, I = net.num_findings;
  if (K < 1) fail("num_diseases must be >= 1");
  if (I < 1) fail("num_findings must be >= 1");
  if (net.prior.size() != K) fail("prior length != K");
  if (net.leak.size() != I || net.theta0.size() != I) fail("leak/theta0 length != I");
  if (static_cast<int>(net.parents.size()) != I ||
      static_cast<int>(net.q.size()) != I ||
      static_cast<int>(net.theta.size()) != I) {
    fail("per-finding edge arrays length != I");
    return v;  // structure too broken for per-edge checks
  }

  for (int k = 0; k < K && k < net.prior.size(); ++k)
    if (!(net.prior[k] > 0.0 && net.prior[k] < 1.0))
      fail("prior out of (0,1) at disease " + std::to_string(k));
  for (int i = 0; i < I && i < net.leak.size(); ++i) {
    if (!(net.leak[i] >= 0.0 && net.leak[i] < 1.0))
      fail("leak out of [0,1) at finding " + std::to_string(i));
    else if (std::abs(net.theta0[i] + std::log1p(-net.leak[i])) > 1e-12)
      fail("theta0/leak mismatch at finding " + std::to_string(i));
  }

  for (int i = 0; i < I; ++i) {
    const auto& par = net.parents[i];
    if (par.empty()) fail("finding " + std::to_string(i) + " has no parents");
    if (static_cast<Eigen::Index>(par.size()) != net.q[i].size() ||
        net.q[i].size() != net.theta[i].size()) {
      fail("edge array length mismatch at finding " + std::to_string(i));
      continue;
    }
    std::set<int> seen;
    for (std::size_t j = 0; j < par.size(); ++j) {
      const int k = par[j];
      if (k < 0 || k >= K) {
        fail("finding " + std::to_string(i) + ": parent index " +
             std::to_string(k) + " out of range");
        continue;
      }
      if (!seen.insert(k).second)
        fail("duplicate edge (" + std::to_string(i) + ", " + std::to_string(k) + ")");
      const double qj = net.q[i][j], tj = net.theta[i][j];
      if (!(qj > 0.0 && qj < 1.0))
        fail("strength out of (0,1) on edge (" + std::to_string(i) + ", " +
             std::to_string(k) + ")");
      if (tj < 0.0)
        fail("negative theta on edge (" + std::to_string(i) + ", " +
             std::to_string(k) + ")");
      else if (std::abs(tj + std::log1p(-qj)) > 1e-12)
        fail("theta/q mismatch on edge (" + std::to_string(i) + ", " +
             std::to_string(k) + ")");
    }
  }
  return v;
}

std::string network_to_json(const Bn2oNetwork& net) {
  json doc;
  doc["K"] = net.num_diseases;
  doc["I"] = net.num_findings;
  doc["prior"] = std::vector<double>(net.prior.data(), net.prior.data() + net.prior.size());
  doc["leak"] = std::vector<double>(net.leak.data(), net.leak.data() + net.leak.size());
  json findings = json::array();
  for (int i = 0; i < net.num_findings; ++i) {
    json f;
    f["parents"] = net.parents[i];
    f["q"] = std::vector<double>(net.q[i].data(), net.q[i].data() + net.q[i].size());
    findings.push_back(std::move(f));
  }
  doc["findings"] = std::move(findings);
  doc["meta"] = {{"seed", net.seed}, {"generator", net.generator}};
  return doc.dump();
}

Bn2oNetwork network_from_json(const std::string& text) {
  const json doc = json::parse(text);
  Bn2oNetwork net;
  net.num_diseases = doc.at("K").get<int>();
  net.num_findings = doc.at("I").get<int>();
  const auto prior = doc.at("prior").get<std::vector<double>>();
  const auto leak = doc.at("leak").get<std::vector<double>>();
  net.prior = Eigen::Map<const Eigen::VectorXd>(prior.data(), prior.size());
  net.leak = Eigen::Map<const Eigen::VectorXd>(leak.data(), leak.size());
  for (const auto& f : doc.at("findings")) {
    net.parents.push_back(f.at("parents").get<std::vector<int>>());
    const auto qs = f.at("q").get<std::vector<double>>();
    net.q.push_back(Eigen::Map<const Eigen::VectorXd>(qs.data(), qs.size()));
  }
  if (doc.contains("meta")) {
    const auto& meta = doc["meta"];
    net.seed = meta.value("seed", std::uint64_t{0});
    net.generator = meta.value("generator", std::string{});
  }
  net.rebuild_theta();
  return net;
}

void save_network(const Bn2oNetwork& net, const std::string& path) {
  atomic_write_file(path, network_to_json(net) + "\n");
}

Bn2oNetwork load_network(const std::string& path) {
  return network_from_json(read_file(path));
}

}  // namespace bn2o
