#include "superres/nn/network.hpp"

#include <cmath>
#include <string>

#include "superres/error.hpp"
#include "superres/rng.hpp"

namespace superres::nn {

namespace {

Shape input_shape(const ArchitectureSpec& arch) { return Shape{1, arch.input_len, false}; }

struct Dispatch {
  kernels::Backend backend;

  void conv_fwd(const kernels::ConvDims& d, std::span<const double> in, std::span<const double> w,
                std::span<const double> b, std::span<double> out) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::conv1d_forward(d, in, w, b, out)
                                          : kernels::reference::conv1d_forward(d, in, w, b, out);
  }
  void conv_bwd(const kernels::ConvDims& d, std::span<const double> in, std::span<const double> w,
                std::span<const double> g, std::span<double> dw, std::span<double> db, std::span<double> din) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::conv1d_backward(d, in, w, g, dw, db, din)
                                          : kernels::reference::conv1d_backward(d, in, w, g, dw, db, din);
  }
  void dense_fwd(const kernels::DenseDims& d, std::span<const double> in, std::span<const double> w,
                 std::span<const double> b, std::span<double> out) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::dense_forward(d, in, w, b, out)
                                          : kernels::reference::dense_forward(d, in, w, b, out);
  }
  void dense_bwd(const kernels::DenseDims& d, std::span<const double> in, std::span<const double> w,
                 std::span<const double> g, std::span<double> dw, std::span<double> db, std::span<double> din) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::dense_backward(d, in, w, g, dw, db, din)
                                          : kernels::reference::dense_backward(d, in, w, g, dw, db, din);
  }
  void relu_fwd(std::span<double> x) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::relu_forward(x) : kernels::reference::relu_forward(x);
  }
  void relu_bwd(std::span<const double> a, std::span<double> g) const {
    backend == kernels::Backend::Parallel ? kernels::parallel::relu_backward(a, g)
                                          : kernels::reference::relu_backward(a, g);
  }
};

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::vector<std::vector<std::size_t>> PredictorParams::weight_shapes() const {
  std::vector<std::vector<std::size_t>> out;
  Shape cur = input_shape(arch);
  const auto shapes = arch.shapes();
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    if (const auto* c = std::get_if<Conv1D>(&arch.layers[i])) {
      out.push_back({c->filters, cur.channels, c->kernel});
    } else if (const auto* d = std::get_if<Dense>(&arch.layers[i])) {
      out.push_back({d->units, cur.size()});
    } else {
      out.push_back({});
    }
    cur = shapes[i];
  }
  return out;
}

PredictorParams PredictorParams::zeros(const ArchitectureSpec& arch) {
  arch.validate();
  PredictorParams p;
  p.arch = arch;
  for (const auto& shape : p.weight_shapes()) {
    LayerParams lp;
    if (!shape.empty()) {
      std::size_t count = 1;
      for (auto s : shape) count *= s;
      lp.weights.assign(count, 0.0);
      lp.bias.assign(shape.front(), 0.0);
    }
    p.layers.push_back(std::move(lp));
  }
  return p;
}

PredictorParams PredictorParams::initialize(const ArchitectureSpec& arch, std::uint64_t seed) {
  PredictorParams p = zeros(arch);
  p.init_seed = seed;
  const auto shapes = p.weight_shapes();
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    if (shapes[i].empty()) continue;
    Rng rng(derive_seed(seed, {i}));
    const std::size_t fan_out = shapes[i][0];
    const std::size_t fan_in = p.layers[i].weights.size() / fan_out;
    bool relu = false;
    if (const auto* c = std::get_if<Conv1D>(&arch.layers[i])) relu = c->activation == Activation::ReLU;
    if (const auto* d = std::get_if<Dense>(&arch.layers[i])) relu = d->activation == Activation::ReLU;
    if (relu) {
      const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
      for (double& w : p.layers[i].weights) w = rng.normal(0.0, stddev);
    } else {
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (double& w : p.layers[i].weights) w = rng.uniform(-limit, limit);
    }
  }
  return p;
}

void PredictorParams::validate() const {
  arch.validate();
  const auto shapes = weight_shapes();
  require(layers.size() == shapes.size(), ErrorKind::Shape,
          "parameter list has " + std::to_string(layers.size()) + " layers, architecture has " +
              std::to_string(shapes.size()));
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    std::size_t count = shapes[i].empty() ? 0 : 1;
    for (auto s : shapes[i]) count *= s;
    const std::size_t bias = shapes[i].empty() ? 0 : shapes[i].front();
    require(layers[i].weights.size() == count && layers[i].bias.size() == bias, ErrorKind::Shape,
            "layer " + std::to_string(i) + " arrays do not match its descriptor");
    require(all_finite(layers[i].weights) && all_finite(layers[i].bias), ErrorKind::Numeric,
            "non-finite parameter in layer " + std::to_string(i));
  }
}

Gradients zero_gradients(const PredictorParams& params) {
  Gradients g(params.layers.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i].weights.assign(params.layers[i].weights.size(), 0.0);
    g[i].bias.assign(params.layers[i].bias.size(), 0.0);
  }
  return g;
}

void BatchEvaluator::run_forward(const PredictorParams& params, std::size_t batch) {
  const Dispatch k{backend_};
  const auto& arch = params.arch;
  const auto shapes = arch.shapes();
  acts_.resize(arch.layers.size() + 1);
  Shape cur = input_shape(arch);
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const Shape out = shapes[i];
    auto& in_buf = acts_[i];
    auto& out_buf = acts_[i + 1];
    out_buf.resize(batch * out.size());
    const auto& lp = params.layers[i];
    bool relu = false;
    if (const auto* c = std::get_if<Conv1D>(&arch.layers[i])) {
      k.conv_fwd({batch, cur.channels, c->filters, cur.length, c->kernel}, in_buf, lp.weights, lp.bias, out_buf);
      relu = c->activation == Activation::ReLU;
    } else if (const auto* d = std::get_if<Dense>(&arch.layers[i])) {
      k.dense_fwd({batch, cur.size(), d->units}, in_buf, lp.weights, lp.bias, out_buf);
      relu = d->activation == Activation::ReLU;
    } else {
      out_buf = in_buf;
    }
    if (relu) k.relu_fwd(out_buf);
    require(all_finite(out_buf), ErrorKind::Numeric, "non-finite activation at layer " + std::to_string(i));
    cur = out;
  }
}

namespace {

void load_inputs(const PredictorParams& params, std::span<const std::span<const double>> inputs,
                 std::vector<double>& dst, std::vector<double>& means, std::vector<double>& scales) {
  const std::size_t m = params.input_len();
  dst.resize(inputs.size() * m);
  means.assign(inputs.size(), 0.0);
  scales.assign(inputs.size(), 1.0);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const auto x = inputs[n];
    require(x.size() == m, ErrorKind::Shape,
            "input length " + std::to_string(x.size()) + " != architecture input_len " + std::to_string(m));
    require(all_finite(x), ErrorKind::Numeric, "non-finite input sample");
    double mean = 0.0;
    double scale = 1.0;
    if (params.preprocessing.standardize_input) {
      for (double v : x) mean += v;
      mean /= static_cast<double>(m);
      double var = 0.0;
      for (double v : x) var += (v - mean) * (v - mean);
      var /= static_cast<double>(m);
      scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    means[n] = mean;
    scales[n] = scale;
    for (std::size_t i = 0; i < m; ++i) dst[n * m + i] = (x[i] - mean) / scale;
  }
}

}  // namespace

std::vector<double> BatchEvaluator::forward(const PredictorParams& params,
                                            std::span<const std::span<const double>> inputs) {
  acts_.resize(params.arch.layers.size() + 1);
  load_inputs(params, inputs, acts_[0], means_, scales_);
  run_forward(params, inputs.size());
  std::vector<double> y = acts_.back();
  if (params.preprocessing.rescale_output) {
    const std::size_t out = params.output_len();
    for (std::size_t n = 0; n < inputs.size(); ++n)
      for (std::size_t j = 0; j < out; ++j) y[n * out + j] = y[n * out + j] * scales_[n] + means_[n];
  }
  return y;
}

double BatchEvaluator::loss_and_gradients(const PredictorParams& params, std::span<const TrainingPair> batch,
                                          Gradients& grads) {
  require(!batch.empty(), ErrorKind::Parameter, "empty batch");
  std::vector<std::span<const double>> inputs;
  inputs.reserve(batch.size());
  for (const auto& ex : batch) inputs.push_back(ex.input);
  const std::vector<double> y = forward(params, inputs);

  const std::size_t out = params.output_len();
  const std::size_t nb = batch.size();
  double loss = 0.0;
  grad_a_.resize(nb * out);
  for (std::size_t n = 0; n < nb; ++n) {
    require(batch[n].target.size() == out, ErrorKind::Shape,
            "target length " + std::to_string(batch[n].target.size()) + " != output_len " + std::to_string(out));
    const double s = params.preprocessing.rescale_output ? scales_[n] : 1.0;
    for (std::size_t j = 0; j < out; ++j) {
      const double r = y[n * out + j] - batch[n].target[j];
      loss += r * r;
      grad_a_[n * out + j] = 2.0 * r * s;
    }
  }
  require(std::isfinite(loss), ErrorKind::Numeric, "non-finite loss");

  const Dispatch k{backend_};
  const auto& arch = params.arch;
  const auto shapes = arch.shapes();
  for (std::size_t li = arch.layers.size(); li-- > 0;) {
    const Shape in_shape = li == 0 ? input_shape(arch) : shapes[li - 1];
    const auto& lp = params.layers[li];
    auto& g = grads[li];
    const bool need_din = li > 0;
    grad_b_.resize(need_din ? nb * in_shape.size() : 0);
    if (const auto* c = std::get_if<Conv1D>(&arch.layers[li])) {
      if (c->activation == Activation::ReLU) k.relu_bwd(acts_[li + 1], grad_a_);
      k.conv_bwd({nb, in_shape.channels, c->filters, in_shape.length, c->kernel}, acts_[li], lp.weights, grad_a_,
                 g.weights, g.bias, grad_b_);
    } else if (const auto* d = std::get_if<Dense>(&arch.layers[li])) {
      if (d->activation == Activation::ReLU) k.relu_bwd(acts_[li + 1], grad_a_);
      k.dense_bwd({nb, in_shape.size(), d->units}, acts_[li], lp.weights, grad_a_, g.weights, g.bias, grad_b_);
    } else {
      grad_b_ = grad_a_;
    }
    std::swap(grad_a_, grad_b_);
  }
  return loss;
}

std::vector<double> forward(const PredictorParams& params, std::span<const double> x_a, kernels::Backend backend) {
  BatchEvaluator eval(backend);
  const std::span<const double> one[] = {x_a};
  return eval.forward(params, one);
}

LossAndGradients loss_and_gradients(const PredictorParams& params, std::span<const TrainingPair> batch,
                                    kernels::Backend backend) {
  BatchEvaluator eval(backend);
  LossAndGradients out;
  out.grads = zero_gradients(params);
  out.loss = eval.loss_and_gradients(params, batch, out.grads);
  return out;
}

SampleWindow predict_window(const PredictorParams& params, const SampleWindow& x_a) {
  require(x_a.size() == params.input_len(), ErrorKind::Shape,
          "predictor expects " + std::to_string(params.input_len()) + " samples, got " + std::to_string(x_a.size()));
  SampleWindow out;
  out.samples = forward(params, x_a.samples);
  out.start_index = x_a.end_index();
  out.provenance = Provenance::Predicted;
  return out;
}

}  // namespace superres::nn
