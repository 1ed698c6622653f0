#include "bn2o/recog.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "bn2o/io.hpp"
#include "bn2o/sampler.hpp"

namespace bn2o {

using nlohmann::json;

RecognitionModel make_lr(const Bn2oNetwork& net) {
  RecognitionModel m;
  m.kind = RecognitionModel::Kind::kLr;
  m.input_size = net.num_findings;
  m.output_size = net.num_diseases;
  m.W = Eigen::MatrixXd::Zero(m.output_size, m.input_size);
  m.a.resize(m.output_size);
  for (int k = 0; k < m.output_size; ++k)
    m.a[k] = std::log(net.prior[k]) - std::log1p(-net.prior[k]);
  return m;
}

RecognitionModel make_mlp(const Bn2oNetwork& net, int hidden, Rng& rng,
                          double init_scale) {
  RecognitionModel m = make_lr(net);
  m.kind = RecognitionModel::Kind::kMlp;
  m.hidden_size = hidden;
  m.V.resize(hidden, m.input_size);
  for (int r = 0; r < m.V.rows(); ++r)
    for (int c = 0; c < m.V.cols(); ++c)
      m.V(r, c) = rng.uniform(-init_scale, init_scale);
  m.b = Eigen::VectorXd::Zero(hidden);
  m.U.resize(m.output_size, hidden);
  for (int r = 0; r < m.U.rows(); ++r)
    for (int c = 0; c < m.U.cols(); ++c)
      m.U(r, c) = rng.uniform(-init_scale, init_scale);
  return m;
}

RecognitionModel make_mlp_from_lr(const RecognitionModel& lr, int hidden,
                                  Rng& rng, double init_scale) {
  if (lr.kind != RecognitionModel::Kind::kLr)
    throw std::invalid_argument("make_mlp_from_lr: source model is not LR");
  RecognitionModel m;
  m.kind = RecognitionModel::Kind::kMlp;
  m.input_size = lr.input_size;
  m.output_size = lr.output_size;
  m.hidden_size = hidden;
  m.W = lr.W;
  m.a = lr.a;
  m.frozen_w = true;
  m.V.resize(hidden, m.input_size);
  for (int r = 0; r < m.V.rows(); ++r)
    for (int c = 0; c < m.V.cols(); ++c)
      m.V(r, c) = rng.uniform(-init_scale, init_scale);
  m.b = Eigen::VectorXd::Zero(hidden);
  m.U.resize(m.output_size, hidden);
  for (int r = 0; r < m.U.rows(); ++r)
    for (int c = 0; c < m.U.cols(); ++c)
      m.U(r, c) = rng.uniform(-init_scale, init_scale);
  return m;
}

Eigen::VectorXd encode_input(const ObservationVector& o) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(o.size());
  for (int i : o.pos) x[i] = 1.0;
  return x;
}

Eigen::MatrixXd forward_batch(const RecognitionModel& m, const Eigen::MatrixXd& X) {
  if (X.rows() != m.input_size)
    throw std::invalid_argument("forward: input size mismatch");
  Eigen::MatrixXd logits = (m.W * X).colwise() + m.a;
  if (m.kind == RecognitionModel::Kind::kMlp) {
    const Eigen::MatrixXd Y = (((m.V * X).colwise() + m.b).array().tanh()).matrix();
    logits += m.U * Y;
  }
  return (1.0 / (1.0 + (-logits.array()).exp())).matrix();
}

Eigen::VectorXd forward(const RecognitionModel& m, const Eigen::VectorXd& x) {
  return forward_batch(m, x);
}

Eigen::VectorXd predict_case(const RecognitionModel& m, const ObservationVector& o) {
  return forward(m, encode_input(o));
}

double loss_and_grad(const RecognitionModel& m, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& targets, double output_clip,
                     Gradients* grads) {
  if (X.cols() != targets.cols() || targets.rows() != m.output_size)
    throw std::invalid_argument("loss_and_grad: batch shape mismatch");
  if (X.cols() == 0) throw std::invalid_argument("loss_and_grad: empty batch");

  Eigen::MatrixXd Y;
  Eigen::MatrixXd logits = (m.W * X).colwise() + m.a;
  if (m.kind == RecognitionModel::Kind::kMlp) {
    Y = (((m.V * X).colwise() + m.b).array().tanh()).matrix();
    logits += m.U * Y;
  }
  const Eigen::ArrayXXd Z = 1.0 / (1.0 + (-logits.array()).exp());

  const Eigen::ArrayXXd Zc = Z.min(1.0 - output_clip).max(output_clip);
  const Eigen::ArrayXXd T = targets.array();
  const double loss = -(T * Zc.log() + (1.0 - T) * (1.0 - Zc).log()).sum();

  if (grads) {
    const Eigen::MatrixXd dlogits = (Z - T).matrix();  // K x B
    grads->a = dlogits.rowwise().sum();
    grads->W = m.frozen_w ? Eigen::MatrixXd::Zero(m.W.rows(), m.W.cols())
                          : Eigen::MatrixXd(dlogits * X.transpose());
    if (m.kind == RecognitionModel::Kind::kMlp) {
      grads->U = dlogits * Y.transpose();
      const Eigen::MatrixXd dY =
          ((m.U.transpose() * dlogits).array() * (1.0 - Y.array().square())).matrix();
      grads->V = dY * X.transpose();
      grads->b = dY.rowwise().sum();
    } else {
      grads->U.resize(0, 0);
      grads->V.resize(0, 0);
      grads->b.resize(0);
    }
  }
  return loss;
}

SampleStream make_augmented_stream(const Bn2oNetwork& net,
                                   const ObservationModel& om,
                                   std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  const Bn2oNetwork* netp = &net;
  const ObservationModel omc = om;
  return [rng, netp, omc](Eigen::VectorXd& x, Eigen::VectorXd& target) {
    DiseaseVector d(netp->num_diseases);
    for (int k = 0; k < netp->num_diseases; ++k)
      d[k] = rng->bernoulli(netp->prior[k]) ? 1 : 0;
    const ObservationVector o = sample_observation(*netp, omc, d, *rng);
    x = encode_input(o);
    target.resize(netp->num_diseases);
    for (int k = 0; k < netp->num_diseases; ++k) target[k] = d[k];
  };
}

std::string TrainerConfig::to_json() const {
  json doc;
  doc["momentum"] = momentum;
  doc["eta0"] = eta0;
  doc["eta_up"] = eta_up;
  doc["eta_down"] = eta_down;
  doc["batch_size"] = batch_size;
  doc["center_decay"] = center_decay;
  doc["loss_ema_decay"] = loss_ema_decay;
  doc["output_clip"] = output_clip;
  doc["num_samples"] = num_samples;
  doc["p_plus"] = p_plus;
  doc["p_minus"] = p_minus;
  doc["seed"] = seed;
  return doc.dump();
}

namespace {

// step = -eta * g + mu * step - center; center is the EMA of applied steps
// (identically zero for bias weights and when decay == 1).
template <typename Mat>
struct StepState {
  Mat step, center;
  void init(const Mat& like) {
    step = Mat::Zero(like.rows(), like.cols());
    center = step;
  }
  void apply(Mat& w, const Mat& g, double eta, double mu, double center_decay,
             bool is_bias) {
    step = (-eta) * g + mu * step - center;
    w += step;
    if (!is_bias && center_decay < 1.0)
      center = center_decay * center + (1.0 - center_decay) * step;
  }
};

}  // namespace

TrainResult train(RecognitionModel& m, const SampleStream& stream,
                  const TrainerConfig& cfg) {
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size < 1");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
    throw std::invalid_argument("train: momentum outside [0,1)");
  if (!(cfg.output_clip > 0.0 && cfg.output_clip < 0.5))
    throw std::invalid_argument("train: output_clip outside (0, 0.5)");
  const long n_batches = cfg.num_samples / cfg.batch_size;
  if (n_batches < 1)
    throw std::invalid_argument("train: fewer samples than one batch");

  const bool mlp = m.kind == RecognitionModel::Kind::kMlp;
  StepState<Eigen::MatrixXd> sW, sV, sU;
  StepState<Eigen::VectorXd> sa, sb;
  sW.init(m.W);
  sa.init(m.a);
  if (mlp) {
    sV.init(m.V);
    sb.init(m.b);
    sU.init(m.U);
  }

  Eigen::MatrixXd X(m.input_size, cfg.batch_size);
  Eigen::MatrixXd T(m.output_size, cfg.batch_size);
  Eigen::VectorXd x, t;
  Gradients g;
  TrainResult result;
  result.loss_trace.reserve(n_batches);

  double eta = cfg.eta0;
  double smoothed = 0.0;
  for (long batch = 0; batch < n_batches; ++batch) {
    for (int c = 0; c < cfg.batch_size; ++c) {
      stream(x, t);
      X.col(c) = x;
      T.col(c) = t;
    }
    const double loss = loss_and_grad(m, X, T, cfg.output_clip, &g);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at batch " +
                               std::to_string(batch) + " (diverged)");
    const double mean_loss = loss / cfg.batch_size;
    if (batch == 0) {
      smoothed = mean_loss;
    } else {
      const double prev = smoothed;
      smoothed = cfg.loss_ema_decay * smoothed + (1.0 - cfg.loss_ema_decay) * mean_loss;
      eta *= smoothed < prev ? cfg.eta_up : cfg.eta_down;
    }
    result.loss_trace.push_back(smoothed);

    sW.apply(m.W, g.W, eta, cfg.momentum, cfg.center_decay, /*is_bias=*/false);
    sa.apply(m.a, g.a, eta, cfg.momentum, cfg.center_decay, /*is_bias=*/true);
    if (mlp) {
      sV.apply(m.V, g.V, eta, cfg.momentum, cfg.center_decay, false);
      sU.apply(m.U, g.U, eta, cfg.momentum, cfg.center_decay, false);
      sb.apply(m.b, g.b, eta, cfg.momentum, cfg.center_decay, /*is_bias=*/true);
    }
  }
  result.batches = n_batches;
  result.final_eta = eta;
  return result;
}

namespace {

std::string encode_matrix(const Eigen::MatrixXd& mat) {
  std::vector<unsigned char> bytes;
  bytes.reserve(static_cast<std::size_t>(mat.size()) * sizeof(double));
  for (Eigen::Index r = 0; r < mat.rows(); ++r)
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      const double v = mat(r, c);
      const auto* p = reinterpret_cast<const unsigned char*>(&v);
      bytes.insert(bytes.end(), p, p + sizeof(double));
    }
  return base64_encode(bytes.data(), bytes.size());
}

Eigen::MatrixXd decode_matrix(const std::string& text, Eigen::Index rows,
                              Eigen::Index cols) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(rows) * cols * sizeof(double))
    throw std::runtime_error("model weight blob has wrong size");
  Eigen::MatrixXd mat(rows, cols);
  const auto* p = bytes.data();
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v;
      std::memcpy(&v, p, sizeof(double));
      p += sizeof(double);
      mat(r, c) = v;
    }
  return mat;
}

}  // namespace

void save_model(const RecognitionModel& m, const std::string& train_config_json,
                const std::string& path) {
  json doc;
  doc["kind"] = m.kind == RecognitionModel::Kind::kLr ? "lr" : "mlp";
  doc["I"] = m.input_size;
  doc["K"] = m.output_size;
  doc["H"] = m.hidden_size;
  doc["frozen_W"] = m.frozen_w;
  doc["dtype"] = "f64le";
  json w;
  w["W"] = encode_matrix(m.W);
  w["a"] = encode_matrix(m.a);
  if (m.kind == RecognitionModel::Kind::kMlp) {
    w["V"] = encode_matrix(m.V);
    w["b"] = encode_matrix(m.b);
    w["U"] = encode_matrix(m.U);
  }
  doc["weights"] = std::move(w);
  doc["train_config"] =
      train_config_json.empty() ? json() : json::parse(train_config_json);
  atomic_write_file(path, doc.dump() + "\n");
}

RecognitionModel load_model(const std::string& path) {
  const json doc = json::parse(read_file(path));
  RecognitionModel m;
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "lr")
    m.kind = RecognitionModel::Kind::kLr;
  else if (kind == "mlp")
    m.kind = RecognitionModel::Kind::kMlp;
  else
    throw std::runtime_error("unknown model kind: " + kind);
  m.input_size = doc.at("I").get<int>();
  m.output_size = doc.at("K").get<int>();
  m.hidden_size = doc.at("H").get<int>();
  m.frozen_w = doc.at("frozen_W").get<bool>();
  if (doc.at("dtype").get<std::string>() != "f64le")
    throw std::runtime_error("unsupported model dtype");
  const auto& w = doc.at("weights");
  m.W = decode_matrix(w.at("W").get<std::string>(), m.output_size, m.input_size);
  m.a = decode_matrix(w.at("a").get<std::string>(), m.output_size, 1);
  if (m.kind == RecognitionModel::Kind::kMlp) {
    m.V = decode_matrix(w.at("V").get<std::string>(), m.hidden_size, m.input_size);
    m.b = decode_matrix(w.at("b").get<std::string>(), m.hidden_size, 1);
    m.U = decode_matrix(w.at("U").get<std::string>(), m.output_size, m.hidden_size);
  }
  return m;
}

}  // namespace bn2o
