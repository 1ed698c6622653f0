#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bn2o/network.hpp"
#include "bn2o/rng.hpp"

namespace bn2o {

// Feed-forward recognition network mapping an evidence vector x to
// factorized posterior marginals z:
//   LR:   z = sigma(a + W x)
//   MLP:  y = tanh(b + V x),  z = sigma(a + W x + U y)
struct RecognitionModel {
  enum class Kind { kLr, kMlp };
  Kind kind = Kind::kLr;
  int input_size = 0;   // I
  int output_size = 0;  // K
  int hidden_size = 0;  // H, MLP only

  Eigen::MatrixXd W;  // K x I
  Eigen::VectorXd a;  // K
  Eigen::MatrixXd V;  // H x I
  Eigen::VectorXd b;  // H
  Eigen::MatrixXd U;  // K x H

  bool frozen_w = false;  // W excluded from training
};

// LR with W = 0 and a at the prior log-odds, so the untrained model
// predicts the prior.
RecognitionModel make_lr(const Bn2oNetwork& net);
// Fresh MLP: LR init for (W, a), V and U uniform on +/-init_scale, b = 0.
RecognitionModel make_mlp(const Bn2oNetwork& net, int hidden, Rng& rng,
                          double init_scale = 0.01);
// Staged MLP: W copied from a trained LR and frozen, a copied, hidden
// weights fresh.
RecognitionModel make_mlp_from_lr(const RecognitionModel& lr, int hidden,
                                  Rng& rng, double init_scale = 0.01);

// x_i = 1 iff o_i = +; negative and unobserved findings both code to 0.
Eigen::VectorXd encode_input(const ObservationVector& o);

Eigen::VectorXd forward(const RecognitionModel& m, const Eigen::VectorXd& x);
// Columns are samples: X is I x B, result K x B.
Eigen::MatrixXd forward_batch(const RecognitionModel& m, const Eigen::MatrixXd& X);

Eigen::VectorXd predict_case(const RecognitionModel& m, const ObservationVector& o);

struct Gradients {
  Eigen::MatrixXd W, V, U;
  Eigen::VectorXd a, b;
};

// Summed cross-entropy over the batch, with z clipped to
// [output_clip, 1 - output_clip] in the loss; gradients by backprop at the
// unclipped outputs. frozen_w zeroes the W gradient.
double loss_and_grad(const RecognitionModel& m, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& targets, double output_clip,
                     Gradients* grads);

struct TrainerConfig {
  double momentum = 0.95;
  double eta0 = 0.01;
  double eta_up = 1.1;    // learning-rate factor on smoothed-loss decrease
  double eta_down = 0.5;  // ... on increase
  int batch_size = 100;
  double center_decay = 0.999;   // EMA decay for the step-centering term; 1 disables
  double loss_ema_decay = 0.9;   // smoothing for the adaptive learning rate
  double output_clip = 1e-7;
  long num_samples = 100000;
  double p_plus = 0.5;   // training-time observation model
  double p_minus = 1.0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

struct TrainResult {
  std::vector<double> loss_trace;  // smoothed mean per-sample loss per batch
  long batches = 0;
  double final_eta = 0.0;
};

// Fills one (x, target) training pair per call.
using SampleStream = std::function<void(Eigen::VectorXd& x, Eigen::VectorXd& target)>;

// Streaming forward samples (o, d) from the augmented network, encoded.
SampleStream make_augmented_stream(const Bn2oNetwork& net,
                                   const ObservationModel& om,
                                   std::uint64_t seed);

// Minibatch SGD with momentum, step centering (non-bias weights only) and a
// multiplicative adaptive global learning rate. Deterministic given
// (model, stream, cfg). Throws on non-finite loss.
TrainResult train(RecognitionModel& m, const SampleStream& stream,
                  const TrainerConfig& cfg);

// Model file: JSON header plus base64 row-major little-endian f64 weights.
void save_model(const RecognitionModel& m, const std::string& train_config_json,
                const std::string& path);
RecognitionModel load_model(const std::string& path);

}  // namespace bn2o
