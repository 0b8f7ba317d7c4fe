#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "superres/binary_io.hpp"
#include "superres/error.hpp"
#include "superres/metrics.hpp"
#include "superres/nn/kernels.hpp"
#include "superres/nn/train.hpp"
#include "superres/nn/weights_io.hpp"
#include "superres/rng.hpp"

using namespace superres;
using namespace superres::nn;
using kernels::ConvDims;
using kernels::DenseDims;
using V = std::vector<double>;
namespace fs = std::filesystem;

namespace {

V random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  V v(n);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

void randomize(PredictorParams& p, Rng& rng, double scale) {
  for (auto& layer : p.layers) {
    for (auto& w : layer.weights) w = rng.normal(0.0, scale);
    for (auto& b : layer.bias) b = rng.normal(0.0, scale);
  }
}

ArchitectureSpec arch_of(std::vector<LayerSpec> layers, std::size_t in, std::size_t out) {
  ArchitectureSpec a;
  a.layers = std::move(layers);
  a.input_len = in;
  a.output_len = out;
  a.validate();
  return a;
}

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "superres_unit";
  fs::create_directories(dir);
  return dir / name;
}

double max_diff(const V& a, const V& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("architecture: default descriptor and parameter count") {
  const auto a = ArchitectureSpec::desk_default(50, 100);
  CHECK(a.describe() == "conv:32:5,conv:64:7,flatten,dense:100:linear");
  CHECK(a.parameter_count() == 32 * (5 + 1) + 64 * (32 * 7 + 1) + 100 * (64 * 50 + 1));
  const auto shapes = a.shapes();
  CHECK(shapes[1] == Shape{64, 50, false});
  CHECK(shapes[2] == Shape{1, 3200, true});
  CHECK(ArchitectureSpec::parse("default", 50, 100) == a);
  CHECK(ArchitectureSpec::parse(a.describe(), 50, 100) == a);
  CHECK_NOTHROW(ArchitectureSpec::full_cnn(50, 100).validate());
  CHECK(architecture_from_json(to_json(a)) == a);
  const auto full = ArchitectureSpec::full_cnn(50, 100);
  CHECK(architecture_from_json(to_json(full)) == full);
}

TEST_CASE("architecture: shape chain validation") {
  const auto kind = [](const std::string& text) {
    try {
      ArchitectureSpec::parse(text, 10, 5);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // no error
  };
  CHECK(kind("conv:4:3,flatten,dense:5:relu") == ErrorKind::Shape);
  CHECK(kind("conv:4:3,flatten,dense:6:linear") == ErrorKind::Shape);
  CHECK(kind("conv:4:3,dense:5:linear") == ErrorKind::Shape);
  CHECK(kind("flatten,conv:4:3,flatten,dense:5:linear") == ErrorKind::Shape);
  CHECK(kind("conv:0:3,flatten,dense:5:linear") != ErrorKind::Io);
  CHECK(kind("") != ErrorKind::Io);
  CHECK(kind("pool:2") != ErrorKind::Io);
  CHECK(kind("dense:5:linear") == ErrorKind::Io);
  CHECK(kind("conv:4:3:linear,flatten,dense:7:relu,dense:5:linear") == ErrorKind::Io);
}

TEST_CASE("kernels: conv forward matches a direct same-padded sum") {
  Rng rng(1);
  for (std::size_t k : {1, 2, 3, 4, 7}) {
    const ConvDims d{2, 3, 4, 6, k};
    const auto in = random_vec(d.batch * d.in_channels * d.length, rng);
    const auto w = random_vec(d.filters * d.in_channels * k, rng);
    const auto b = random_vec(d.filters, rng);
    V out(d.batch * d.filters * d.length);
    kernels::reference::conv1d_forward(d, in, w, b, out);
    const long pad = static_cast<long>((k - 1) / 2);
    for (std::size_t n = 0; n < d.batch; ++n)
      for (std::size_t f = 0; f < d.filters; ++f)
        for (std::size_t t = 0; t < d.length; ++t) {
          double acc = b[f];
          for (std::size_t c = 0; c < d.in_channels; ++c)
            for (std::size_t j = 0; j < k; ++j) {
              const long src = static_cast<long>(t + j) - pad;
              if (src < 0 || src >= static_cast<long>(d.length)) continue;
              acc += w[(f * d.in_channels + c) * k + j] * in[(n * d.in_channels + c) * d.length + src];
            }
          CHECK(std::abs(out[(n * d.filters + f) * d.length + t] - acc) < 1e-12);
        }
  }
}

TEST_CASE("kernels: parallel backend agrees with the reference") {
  Rng rng(2);
  for (int t = 0; t < 12; ++t) {
    const ConvDims cd{1 + (std::size_t)rng.uniform_int(0, 5), 1 + (std::size_t)rng.uniform_int(0, 4),
                      1 + (std::size_t)rng.uniform_int(0, 6), 1 + (std::size_t)rng.uniform_int(0, 20),
                      1 + (std::size_t)rng.uniform_int(0, 8)};
    const auto in = random_vec(cd.batch * cd.in_channels * cd.length, rng);
    const auto w = random_vec(cd.filters * cd.in_channels * cd.kernel, rng);
    const auto b = random_vec(cd.filters, rng);
    const auto dout = random_vec(cd.batch * cd.filters * cd.length, rng);
    V o1(dout.size()), o2(dout.size());
    kernels::reference::conv1d_forward(cd, in, w, b, o1);
    kernels::parallel::conv1d_forward(cd, in, w, b, o2);
    CHECK(max_diff(o1, o2) < 1e-12);
    V dw1(w.size(), 0.5), db1(b.size(), 0.5), di1(in.size(), 9.0);
    V dw2(w.size(), 0.5), db2(b.size(), 0.5), di2(in.size(), -9.0);
    kernels::reference::conv1d_backward(cd, in, w, dout, dw1, db1, di1);
    kernels::parallel::conv1d_backward(cd, in, w, dout, dw2, db2, di2);
    CHECK(max_diff(dw1, dw2) < 1e-12);
    CHECK(max_diff(db1, db2) < 1e-12);
    CHECK(max_diff(di1, di2) < 1e-12);

    const DenseDims dd{1 + (std::size_t)rng.uniform_int(0, 5), 1 + (std::size_t)rng.uniform_int(0, 30),
                       1 + (std::size_t)rng.uniform_int(0, 10)};
    const auto din = random_vec(dd.batch * dd.in_features, rng);
    const auto dwt = random_vec(dd.units * dd.in_features, rng);
    const auto dbs = random_vec(dd.units, rng);
    const auto ddout = random_vec(dd.batch * dd.units, rng);
    V p1(ddout.size()), p2(ddout.size());
    kernels::reference::dense_forward(dd, din, dwt, dbs, p1);
    kernels::parallel::dense_forward(dd, din, dwt, dbs, p2);
    CHECK(max_diff(p1, p2) < 1e-12);
    V gw1(dwt.size()), gb1(dbs.size()), gi1(din.size()), gw2(dwt.size()), gb2(dbs.size()), gi2(din.size());
    kernels::reference::dense_backward(dd, din, dwt, ddout, gw1, gb1, gi1);
    kernels::parallel::dense_backward(dd, din, dwt, ddout, gw2, gb2, gi2);
    CHECK(max_diff(gw1, gw2) < 1e-12);
    CHECK(max_diff(gb1, gb2) < 1e-12);
    CHECK(max_diff(gi1, gi2) < 1e-12);

    V r1 = o1, r2 = o1;
    kernels::reference::relu_forward(r1);
    kernels::parallel::relu_forward(r2);
    CHECK(r1 == r2);
    V g1 = dout, g2 = dout;
    kernels::reference::relu_backward(r1, g1);
    kernels::parallel::relu_backward(r2, g2);
    CHECK(g1 == g2);
  }
}

TEST_CASE("forward: zero net, identity net, determinism") {
  const auto dense_only = arch_of({Dense{8, Activation::Linear}}, 8, 8);
  auto p = PredictorParams::zeros(dense_only);
  p.preprocessing.standardize_input = false;
  Rng rng(3);
  const auto x = random_vec(8, rng);
  for (double v : forward(p, x)) CHECK(v == 0.0);

  for (std::size_t i = 0; i < 8; ++i) p.layers[0].weights[i * 8 + i] = 1.0;
  CHECK(forward(p, x) == x);

  auto q = PredictorParams::initialize(ArchitectureSpec::desk_default(50, 100), 77);
  const auto x50 = random_vec(50, rng);
  const auto y1 = forward(q, x50);
  const auto y2 = forward(q, x50);
  const auto y3 = forward(q, x50, kernels::Backend::Reference);
  CHECK(y1 == y2);
  CHECK(max_diff(y1, y3) < 1e-12);
  CHECK(PredictorParams::initialize(q.arch, 77) == q);
  CHECK(!(PredictorParams::initialize(q.arch, 78) == q));
}

TEST_CASE("forward: shape and numeric errors") {
  auto p = PredictorParams::initialize(arch_of({Conv1D{2, 3}, Flatten{}, Dense{4}}, 6, 4), 1);
  try {
    forward(p, V(5, 1.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
  for (auto& w : p.layers[0].weights) w = 1e300;
  p.layers[2].weights.assign(p.layers[2].weights.size(), 1e300);
  try {
    forward(p, V{1, 2, 3, 4, 5, 6});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("layer") != std::string::npos);
  }
  V bad(6, 1.0);
  bad[2] = std::nan("");
  p = PredictorParams::initialize(p.arch, 1);
  CHECK_THROWS_AS(forward(p, bad), Error);
}

TEST_CASE("loss: optimum gives zero loss and zero gradients") {
  auto p = PredictorParams::zeros(arch_of({Dense{5, Activation::Linear}}, 5, 5));
  p.preprocessing.standardize_input = false;
  for (std::size_t i = 0; i < 5; ++i) p.layers[0].weights[i * 5 + i] = 1.0;
  const V x{0.3, -1.0, 2.0, 0.1, 0.7};
  const TrainingPair pair{x, x};
  const auto lg = loss_and_gradients(p, std::span(&pair, 1));
  CHECK(lg.loss == 0.0);
  for (const auto& g : lg.grads) {
    for (double v : g.weights) CHECK(v == 0.0);
    for (double v : g.bias) CHECK(v == 0.0);
  }
}

TEST_CASE("loss: single dense layer closed-form gradient") {
  Rng rng(4);
  auto p = PredictorParams::zeros(arch_of({Dense{3, Activation::Linear}}, 4, 3));
  p.preprocessing.standardize_input = false;
  randomize(p, rng, 1.0);
  const auto x = random_vec(4, rng), y = random_vec(3, rng);
  const TrainingPair pair{x, y};
  const auto lg = loss_and_gradients(p, std::span(&pair, 1));
  const auto& w = p.layers[0].weights;
  double loss = 0;
  for (std::size_t u = 0; u < 3; ++u) {
    double gx = p.layers[0].bias[u];
    for (std::size_t i = 0; i < 4; ++i) gx += w[u * 4 + i] * x[i];
    const double r = gx - y[u];
    loss += r * r;
    CHECK(std::abs(lg.grads[0].bias[u] - 2 * r) < 1e-12);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(lg.grads[0].weights[u * 4 + i] - 2 * r * x[i]) < 1e-12);
  }
  CHECK(std::abs(lg.loss - loss) < 1e-12);
}

TEST_CASE("gradients match central finite differences on random small networks") {
  const auto report = gradcheck::random_networks(2025, 24);
  CHECK(report.configs >= 20);
  for (const auto& f : report.failures)
    FAIL_CHECK(f.where << ": analytic " << f.analytic << " numeric " << f.numeric << " rel " << f.rel);
  MESSAGE("checked " << report.entries << " entries, worst relative error " << report.worst);
}

TEST_CASE("backends give the same loss and gradients") {
  Rng rng(6);
  auto p = PredictorParams::initialize(ArchitectureSpec::parse("conv:4:5,conv:6:4,flatten,dense:9:relu,dense:7:linear", 12, 7), 3);
  std::vector<V> xs, ys;
  std::vector<TrainingPair> pairs;
  for (int b = 0; b < 5; ++b) {
    xs.push_back(random_vec(12, rng));
    ys.push_back(random_vec(7, rng));
  }
  for (int b = 0; b < 5; ++b) pairs.push_back({xs[b], ys[b]});
  const auto a = loss_and_gradients(p, pairs, kernels::Backend::Reference);
  const auto c = loss_and_gradients(p, pairs, kernels::Backend::Parallel);
  CHECK(oracle::rel_error(a.loss, c.loss, 1e-300) < 1e-12);
  for (std::size_t l = 0; l < a.grads.size(); ++l) {
    CHECK(max_diff(a.grads[l].weights, c.grads[l].weights) < 1e-10);
    CHECK(max_diff(a.grads[l].bias, c.grads[l].bias) < 1e-10);
  }
}

TEST_CASE("train: config validation") {
  TrainConfig cfg;
  CHECK(cfg.epochs == 50);
  CHECK(cfg.batch_size == 50);
  CHECK(cfg.learning_rate == 0.001);
  CHECK(cfg.adam_beta1 == 0.9);
  CHECK(cfg.adam_beta2 == 0.999);
  CHECK(cfg.adam_eps == 1e-8);
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("train: memorizes a single example") {
  Rng rng(9);
  const auto x = random_vec(20, rng), y = random_vec(10, rng);
  const TrainingPair pair{x, y};
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch_size = 1;
  cfg.init_seed = 1;
  const auto res = train(std::span(&pair, 1), ArchitectureSpec::parse("conv:8:5,flatten,dense:10:linear", 20, 10), cfg);
  REQUIRE(res.history.size() == 500);
  CHECK(!res.diverged);
  CHECK(res.history.back() < 1e-3 * res.history.front());
}

TEST_CASE("train: deterministic per seed") {
  datagen::DatasetRecipe r;
  r.id = datagen::RecipeId::Set5;
  r.n = 30;
  r.m = 12;
  r.set_size = 40;
  r.seed = 4;
  const auto ds = datagen::generate(r);
  const auto arch = ArchitectureSpec::parse("conv:4:3,flatten,dense:18:linear", 12, 18);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 7;
  cfg.init_seed = cfg.shuffle_seed = 11;
  const auto a = train(ds, arch, cfg);
  const auto b = train(ds, arch, cfg);
  CHECK(a.params == b.params);
  CHECK(a.history == b.history);
  CHECK(a.params.components == 2);
  for (double v : a.history) CHECK(std::isfinite(v));
  cfg.backend = kernels::Backend::Reference;
  const auto c = train(ds, arch, cfg);
  for (std::size_t e = 0; e < a.history.size(); ++e) CHECK(oracle::rel_error(a.history[e], c.history[e], 1e-300) < 1e-9);
  cfg.shuffle_seed = 12;
  CHECK(!(train(ds, arch, cfg).params == a.params));
}

TEST_CASE("train: divergence returns the last good checkpoint") {
  Rng rng(10);
  const auto x = random_vec(8, rng), y = random_vec(4, rng);
  const TrainingPair pair{x, y};
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 1;
  cfg.learning_rate = 1e305;
  const auto res = train(std::span(&pair, 1), ArchitectureSpec::parse("dense:16:relu,dense:4:linear", 8, 4), cfg);
  CHECK(res.diverged);
  CHECK(!res.message.empty());
  CHECK_NOTHROW(res.params.validate());
}

TEST_CASE("train: linear net reaches the optimum on linearly predictable data") {
  // Fixed frequencies with random amplitudes and phases: the continuation is an
  // exact linear function of the observed samples.
  Rng rng(12);
  const std::size_t m = 8, out = 4;
  std::vector<V> xs, ys;
  for (int i = 0; i < 64; ++i) {
    const auto w = synthesize(SinusoidSpec{{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)}, {0.1, 0.23}}, m + out,
                              rng.uniform_int(1, 1000));
    xs.emplace_back(w.samples.begin(), w.samples.begin() + m);
    ys.emplace_back(w.samples.begin() + m, w.samples.end());
  }
  std::vector<TrainingPair> pairs;
  for (std::size_t i = 0; i < xs.size(); ++i) pairs.push_back({xs[i], ys[i]});
  TrainConfig cfg;
  cfg.epochs = 3000;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.01;
  cfg.preprocessing.standardize_input = false;
  const auto res = train(pairs, ArchitectureSpec::parse("dense:4:linear", m, out), cfg);
  CHECK(res.history.back() <= 1e-6 * res.history.front());
  MESSAGE("linear fit loss ratio " << res.history.back() / res.history.front());
}

TEST_CASE("predict_window: length and indices") {
  const auto p = PredictorParams::initialize(ArchitectureSpec::desk_default(50, 100), 1);
  const auto x_a = synthesize(SinusoidSpec{{1.0}, {0.1}}, 50);
  const auto pred = predict_window(p, x_a);
  CHECK(pred.size() == 100);
  CHECK(pred.start_index == 51);
  CHECK(pred.provenance == Provenance::Predicted);
  CHECK(concat(x_a, pred).size() == 150);
  CHECK_THROWS_AS(predict_window(p, synthesize(SinusoidSpec{{1.0}, {0.1}}, 49)), Error);
}

TEST_CASE("weights: exact round trip") {
  Rng rng(13);
  auto p = PredictorParams::initialize(ArchitectureSpec::parse("conv:3:4,flatten,dense:5:relu,dense:6:linear", 9, 6), 21);
  randomize(p, rng, 1.0);
  p.shuffle_seed = 99;
  p.components = 2;
  p.preprocessing.rescale_output = true;
  const auto path = temp_path("w.bin");
  save_params(p, path);
  const auto q = load_params(path);
  CHECK(q == p);
  CHECK(load_params(path, p.arch) == p);
  save_params(q, temp_path("w2.bin"));
  CHECK(io::read_file(path) == io::read_file(temp_path("w2.bin")));
}

TEST_CASE("weights: truncation, corruption and mismatch") {
  const auto p = PredictorParams::initialize(ArchitectureSpec::parse("conv:2:3,flatten,dense:4:linear", 6, 4), 2);
  const auto path = temp_path("w3.bin");
  save_params(p, path);
  const auto bytes = io::read_file(path);
  const auto expect_format = [](const fs::path& f, const std::optional<ArchitectureSpec>& arch = std::nullopt) {
    try {
      load_params(f, arch);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Format);
      return std::string(e.what());
    }
    FAIL("expected a format error");
    return std::string();
  };

  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    io::write_file(temp_path("cut.bin"), std::span(bytes.data(), cut));
    expect_format(temp_path("cut.bin"));
  }
  auto extra = bytes;
  extra.push_back(0);
  io::write_file(temp_path("extra.bin"), extra);
  expect_format(temp_path("extra.bin"));
  auto magic = bytes;
  magic[0] = 'X';
  io::write_file(temp_path("magic.bin"), magic);
  expect_format(temp_path("magic.bin"));
  auto version = bytes;
  version[8] = 7;
  io::write_file(temp_path("version.bin"), version);
  expect_format(temp_path("version.bin"));

  const auto other = ArchitectureSpec::parse("conv:5:3,flatten,dense:4:linear", 6, 4);
  const auto msg = expect_format(path, other);
  CHECK(msg.find(p.arch.describe()) != std::string::npos);
  CHECK(msg.find(other.describe()) != std::string::npos);

  try {
    load_params(temp_path("does_not_exist.bin"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
