#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/costs.hpp"

namespace destim {

enum class Activation { relu, tanh };

/// Feedforward estimator u(x, alpha): affine layers with the chosen hidden
/// activation and an identity output layer. All weights and biases live in
/// one flat parameter vector, per layer weights (row-major) then biases.
class NeuralEstimator {
 public:
  NeuralEstimator(std::vector<std::size_t> layer_sizes, Activation activation);

  /// Weights drawn uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
  static NeuralEstimator initialized(std::vector<std::size_t> layer_sizes, Activation activation,
                                     std::uint64_t seed);

  std::size_t input_dim() const { return layer_sizes_.front(); }
  std::size_t output_dim() const { return layer_sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const;

 private:
  friend std::vector<double> grad_alpha(const NeuralEstimator&, CostKind, std::span<const double>,
                                        std::span<const double>);
  std::vector<std::size_t> layer_sizes_;
  Activation activation_;
  std::vector<double> params_;
};

/// Gradient of C(u(x, alpha), theta) with respect to alpha, by
/// backpropagation; layout matches the flat parameter vector.
std::vector<double> grad_alpha(const NeuralEstimator& net, CostKind cost, std::span<const double> x,
                               std::span<const double> theta);

/// Single-pair update alpha <- alpha - lr * grad_alpha. Throws on a
/// non-finite gradient.
void sgd_step(NeuralEstimator& net, double learning_rate, CostKind cost, std::span<const double> x,
              std::span<const double> theta);

enum class BatchMode { stochastic, full_gradient };

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t max_epochs = 100;
  BatchMode batch_mode = BatchMode::stochastic;
  bool shuffle_each_epoch = true;
  std::uint64_t seed = 0;
  double early_stop_tolerance = 1e-8;  // relative epoch-loss change
  CostKind cost = CostKind::squared_error;
};

/// (X, theta) pairs with uniform dimensions; rows of `x` and `theta` pair up.
struct PairedDataset {
  Matrix x;
  Matrix theta;
  std::size_t size() const { return x.rows(); }
};

struct TrainResult {
  std::vector<double> loss_trace;  // [0] is the initial dataset-average cost
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

/// Trains in place. Stochastic mode reuses the dataset each epoch after a
/// fresh seeded permutation; full-gradient mode takes one averaged step per
/// epoch. Aborts with a diagnostic when the epoch loss exceeds 10x the
/// initial loss.
TrainResult train(NeuralEstimator& net, const TrainConfig& cfg, const PairedDataset& data);

/// Independent seeded runs; keeps the net with the best final loss. Guards
/// against bad local minima without pretending any single run is global.
NeuralEstimator train_with_restarts(const std::vector<std::size_t>& layer_sizes,
                                    Activation activation, const TrainConfig& cfg,
                                    const PairedDataset& data, std::size_t restarts,
                                    TrainResult* best_result = nullptr);

double dataset_loss(const NeuralEstimator& net, CostKind cost, const PairedDataset& data);

std::string model_to_json(const NeuralEstimator& net);
NeuralEstimator model_from_json(const std::string& text);
void save_model(const NeuralEstimator& net, const std::string& path);
NeuralEstimator load_model(const std::string& path);

const char* activation_name(Activation a);
bool parse_activation(std::string_view name, Activation& out);

}  // namespace destim
