#include "core/net.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/rng.hpp"

namespace destim {

namespace {

double activate(Activation a, double z) {
  return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_deriv(Activation a, double z) {
  if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
  double t = std::tanh(z);
  return 1.0 - t * t;
}

std::size_t expected_param_count(const std::vector<std::size_t>& sizes) {
  std::size_t total = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) total += (sizes[l - 1] + 1) * sizes[l];
  return total;
}

}  // namespace

NeuralEstimator::NeuralEstimator(std::vector<std::size_t> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  require(layer_sizes_.size() >= 2, Errc::invalid_argument, "need at least input and output layers");
  for (std::size_t s : layer_sizes_)
    require(s >= 1, Errc::invalid_argument, "layer sizes must be positive");
  params_.assign(expected_param_count(layer_sizes_), 0.0);
}

NeuralEstimator NeuralEstimator::initialized(std::vector<std::size_t> layer_sizes,
                                             Activation activation, std::uint64_t seed) {
  NeuralEstimator net(std::move(layer_sizes), activation);
  Rng rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 1; l < net.layer_sizes_.size(); ++l) {
    std::size_t fan_in = net.layer_sizes_[l - 1];
    std::size_t fan_out = net.layer_sizes_[l];
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k)
      net.params_[offset + k] = rng.uniform(-bound, bound);
    offset += fan_in * fan_out + fan_out;  // biases stay zero
  }
  return net;
}

std::vector<double> NeuralEstimator::forward(std::span<const double> x) const {
  require(x.size() == input_dim(), Errc::dimension_mismatch, "forward: x length != input size");
  std::vector<double> act(x.begin(), x.end());
  std::size_t offset = 0;
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    std::size_t fan_in = layer_sizes_[l - 1];
    std::size_t fan_out = layer_sizes_[l];
    const double* w = params_.data() + offset;
    const double* b = w + fan_in * fan_out;
    std::vector<double> next(fan_out);
    bool last = l + 1 == layer_sizes_.size();
    for (std::size_t i = 0; i < fan_out; ++i) {
      double z = b[i];
      const double* wrow = w + i * fan_in;
      for (std::size_t j = 0; j < fan_in; ++j) z += wrow[j] * act[j];
      next[i] = last ? z : activate(activation_, z);
    }
    act = std::move(next);
    offset += fan_in * fan_out + fan_out;
  }
  return act;
}

std::vector<double> grad_alpha(const NeuralEstimator& net, CostKind cost, std::span<const double> x,
                               std::span<const double> theta) {
  const auto& sizes = net.layer_sizes_;
  require(x.size() == sizes.front(), Errc::dimension_mismatch, "grad_alpha: x length mismatch");
  require(theta.size() == sizes.back(), Errc::dimension_mismatch,
          "grad_alpha: theta length mismatch");

  std::size_t layers = sizes.size() - 1;
  std::vector<std::vector<double>> activations(layers + 1);
  std::vector<std::vector<double>> preacts(layers);
  activations[0].assign(x.begin(), x.end());

  std::vector<std::size_t> offsets(layers);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    std::size_t fan_in = sizes[l];
    std::size_t fan_out = sizes[l + 1];
    const double* w = net.params_.data() + offset;
    const double* b = w + fan_in * fan_out;
    preacts[l].resize(fan_out);
    activations[l + 1].resize(fan_out);
    bool last = l + 1 == layers;
    for (std::size_t i = 0; i < fan_out; ++i) {
      double z = b[i];
      const double* wrow = w + i * fan_in;
      for (std::size_t j = 0; j < fan_in; ++j) z += wrow[j] * activations[l][j];
      preacts[l][i] = z;
      activations[l + 1][i] = last ? z : activate(net.activation_, z);
    }
    offset += fan_in * fan_out + fan_out;
  }

  // delta for the identity output layer is the cost gradient itself.
  std::vector<double> delta = cost_grad_u(cost, activations[layers], theta);

  std::vector<double> grad(net.params_.size(), 0.0);
  for (std::size_t l = layers; l-- > 0;) {
    std::size_t fan_in = sizes[l];
    std::size_t fan_out = sizes[l + 1];
    double* gw = grad.data() + offsets[l];
    double* gb = gw + fan_in * fan_out;
    for (std::size_t i = 0; i < fan_out; ++i) {
      gb[i] = delta[i];
      double* grow = gw + i * fan_in;
      for (std::size_t j = 0; j < fan_in; ++j) grow[j] = delta[i] * activations[l][j];
    }
    if (l > 0) {
      const double* w = net.params_.data() + offsets[l];
      std::vector<double> prev(fan_in, 0.0);
      for (std::size_t j = 0; j < fan_in; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < fan_out; ++i) acc += w[i * fan_in + j] * delta[i];
        prev[j] = acc * activate_deriv(net.activation_, preacts[l - 1][j]);
      }
      delta = std::move(prev);
    }
  }
  return grad;
}

void sgd_step(NeuralEstimator& net, double learning_rate, CostKind cost, std::span<const double> x,
              std::span<const double> theta) {
  require(learning_rate >= 0.0, Errc::invalid_argument, "learning rate must be nonnegative");
  std::vector<double> grad = grad_alpha(net, cost, x, theta);
  for (double g : grad)
    require(std::isfinite(g), Errc::diverged, "sgd_step: non-finite gradient encountered");
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
}

double dataset_loss(const NeuralEstimator& net, CostKind kind, const PairedDataset& data) {
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto u = net.forward(data.x.row(i));
    acc += cost(kind, u, data.theta.row(i));
  }
  return acc / static_cast<double>(data.size());
}

TrainResult train(NeuralEstimator& net, const TrainConfig& cfg, const PairedDataset& data) {
  require(cfg.learning_rate > 0.0, Errc::invalid_argument, "learning rate must be positive");
  require(data.size() >= 1, Errc::invalid_argument, "training dataset is empty");
  require(data.x.rows() == data.theta.rows(), Errc::dimension_mismatch,
          "paired dataset row counts differ");
  require(data.x.cols() == net.input_dim() && data.theta.cols() == net.output_dim(),
          Errc::dimension_mismatch, "paired dataset dims do not match the network");

  TrainResult result;
  result.loss_trace.push_back(dataset_loss(net, cfg.cost, data));
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (cfg.batch_mode == BatchMode::stochastic) {
      if (cfg.shuffle_each_epoch) rng.shuffle(order);
      for (std::size_t i : order)
        sgd_step(net, cfg.learning_rate, cfg.cost, data.x.row(i), data.theta.row(i));
    } else {
      std::vector<double> avg(net.param_count(), 0.0);
      for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> g = grad_alpha(net, cfg.cost, data.x.row(i), data.theta.row(i));
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += g[k];
      }
      double scale = cfg.learning_rate / static_cast<double>(data.size());
      auto params = net.params();
      for (std::size_t k = 0; k < params.size(); ++k) {
        double step = scale * avg[k];
        require(std::isfinite(step), Errc::diverged, "train: non-finite gradient encountered");
        params[k] -= step;
      }
    }

    double loss = dataset_loss(net, cfg.cost, data);
    double prev = result.loss_trace.back();
    result.loss_trace.push_back(loss);
    result.epochs_run = epoch;

    double initial = result.loss_trace.front();
    if (!std::isfinite(loss) || (initial > 0.0 && loss > 10.0 * initial)) {
      fail(Errc::diverged, "train: epoch loss " + std::to_string(loss) + " exceeds 10x initial " +
                               std::to_string(initial) + " at epoch " + std::to_string(epoch));
    }
    if (std::abs(prev - loss) <= cfg.early_stop_tolerance * std::max(prev, 0.0)) {
      result.early_stopped = true;
      break;
    }
  }
  result.final_loss = result.loss_trace.back();
  return result;
}

NeuralEstimator train_with_restarts(const std::vector<std::size_t>& layer_sizes,
                                    Activation activation, const TrainConfig& cfg,
                                    const PairedDataset& data, std::size_t restarts,
                                    TrainResult* best_result) {
  require(restarts >= 1, Errc::invalid_argument, "restarts must be >= 1");
  NeuralEstimator best(layer_sizes, activation);
  TrainResult best_res;
  bool have_best = false;
  std::string last_error;
  for (std::size_t r = 0; r < restarts; ++r) {
    NeuralEstimator net =
        NeuralEstimator::initialized(layer_sizes, activation, derive_seed(cfg.seed, 2 * r));
    TrainConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, 2 * r + 1);
    try {
      TrainResult res = train(net, run_cfg, data);
      if (!have_best || res.final_loss < best_res.final_loss) {
        best = std::move(net);
        best_res = std::move(res);
        have_best = true;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::diverged) throw;
      last_error = e.what();
    }
  }
  if (!have_best) fail(Errc::diverged, "all training restarts diverged; last: " + last_error);
  if (best_result) *best_result = best_res;
  return best;
}

const char* activation_name(Activation a) {
  return a == Activation::relu ? "relu" : "tanh";
}

bool parse_activation(std::string_view name, Activation& out) {
  if (name == "relu") {
    out = Activation::relu;
  } else if (name == "tanh") {
    out = Activation::tanh;
  } else {
    return false;
  }
  return true;
}

std::string model_to_json(const NeuralEstimator& net) {
  nlohmann::ordered_json doc;
  doc["layer_sizes"] = net.layer_sizes();
  doc["activation"] = activation_name(net.activation());
  doc["params"] = std::vector<double>(net.params().begin(), net.params().end());
  return doc.dump(2);
}

NeuralEstimator model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_failure, std::string("model parse error: ") + e.what());
  }
  try {
    auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    Activation act;
    require(parse_activation(doc.at("activation").get<std::string>(), act), Errc::parse_failure,
            "model: unknown activation");
    auto params = doc.at("params").get<std::vector<double>>();
    NeuralEstimator net(sizes, act);
    require(params.size() == net.param_count(), Errc::parse_failure,
            "model: parameter count does not match layer sizes");
    std::copy(params.begin(), params.end(), net.params().begin());
    return net;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_failure, std::string("model parse error: ") + e.what());
  }
}

void save_model(const NeuralEstimator& net, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::io_failure, "cannot open model file for writing: " + path);
  out << model_to_json(net) << '\n';
  require(out.good(), Errc::io_failure, "failed writing model file: " + path);
}

NeuralEstimator load_model(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_failure, "cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace destim
