#include "superres/nn/train.hpp"

#include <cmath>
#include <numeric>

#include "superres/error.hpp"
#include "superres/rng.hpp"

namespace superres::nn {

void TrainConfig::validate() const {
  require(epochs >= 1, ErrorKind::Parameter, "epochs must be >= 1");
  require(batch_size >= 1, ErrorKind::Parameter, "batch_size must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorKind::Parameter, "learning_rate must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0, ErrorKind::Parameter,
          "Adam betas must lie in [0, 1)");
  require(adam_eps > 0.0, ErrorKind::Parameter, "adam_eps must be > 0");
}

Adam::Adam(const PredictorParams& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(zero_gradients(params)), v_(zero_gradients(params)) {}

void Adam::step(PredictorParams& params, const Gradients& grads, double grad_scale) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g[i] * grad_scale;
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      theta[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weights, grads[l].weights, m_[l].weights, v_[l].weights);
    update(params.layers[l].bias, grads[l].bias, m_[l].bias, v_[l].bias);
  }
}

namespace {

void reset(Gradients& g) {
  for (auto& l : g) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

bool finite_params(const PredictorParams& p) {
  for (const auto& l : p.layers) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

}  // namespace

TrainResult train(std::span<const TrainingPair> examples, const ArchitectureSpec& arch, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  arch.validate();
  require(!examples.empty(), ErrorKind::Parameter, "training set is empty");
  for (const auto& ex : examples) {
    require(ex.input.size() == arch.input_len && ex.target.size() == arch.output_len, ErrorKind::Shape,
            "example lengths (" + std::to_string(ex.input.size()) + ", " + std::to_string(ex.target.size()) +
                ") do not match architecture (" + std::to_string(arch.input_len) + ", " +
                std::to_string(arch.output_len) + ")");
  }

  TrainResult result;
  result.params = PredictorParams::initialize(arch, cfg.init_seed);
  result.params.shuffle_seed = cfg.shuffle_seed;
  result.params.preprocessing = cfg.preprocessing;
  PredictorParams checkpoint = result.params;

  Adam adam(result.params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  BatchEvaluator eval(cfg.backend);
  Gradients grads = zero_gradients(result.params);
  std::vector<std::size_t> order(examples.size());
  std::vector<TrainingPair> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.shuffle_seed, {epoch}));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    bool failed = false;
    for (std::size_t start = 0; start < order.size() && !failed; start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(examples[order[i]]);
      reset(grads);
      double loss = 0.0;
      try {
        loss = eval.loss_and_gradients(result.params, batch, grads);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numeric) throw;
        result.message = e.what();
        failed = true;
        break;
      }
      epoch_loss += loss;
      adam.step(result.params, grads, 1.0 / static_cast<double>(batch.size()));
      if (!finite_params(result.params)) {
        result.message = "non-finite parameters after Adam step";
        failed = true;
      }
    }
    if (failed || !std::isfinite(epoch_loss)) {
      result.diverged = true;
      if (result.message.empty()) result.message = "non-finite epoch loss";
      result.message += " (epoch " + std::to_string(epoch + 1) + ")";
      result.params = std::move(checkpoint);
      return result;
    }
    const double mean_loss = epoch_loss / static_cast<double>(examples.size());
    result.history.push_back(mean_loss);
    checkpoint = result.params;
    if (on_epoch) on_epoch(epoch + 1, mean_loss);
  }
  return result;
}

std::vector<TrainingPair> training_pairs(const datagen::Dataset& dataset) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(dataset.size());
  for (const auto& ex : dataset.examples) pairs.push_back({ex.x_a, ex.x_m});
  return pairs;
}

TrainResult train(const datagen::Dataset& dataset, const ArchitectureSpec& arch, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  const auto pairs = training_pairs(dataset);
  TrainResult r = train(pairs, arch, cfg, on_epoch);
  if (!dataset.examples.empty()) r.params.components = dataset.examples.front().truth.count();
  return r;
}

}  // namespace superres::nn
