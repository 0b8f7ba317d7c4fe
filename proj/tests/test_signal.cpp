#include "doctest.h"
#include "oracles.hpp"
#include "superres/error.hpp"
#include "superres/linear_predictor.hpp"
#include "superres/signal.hpp"

using namespace superres;

TEST_CASE("synthesize: quarter-period samples") {
  const auto w = synthesize(SinusoidSpec{{1.0}, {0.25}}, 4);
  REQUIRE(w.size() == 4);
  const double expect[] = {1, 0, -1, 0};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(w.samples[i] - expect[i]) < 1e-12);
  CHECK(w.start_index == 1);
  CHECK(w.provenance == Provenance::True);
}

TEST_CASE("synthesize: DFT peaks at the component frequencies") {
  const auto w = synthesize(SinusoidSpec{{1.0, 1.0}, {0.1, 0.2}}, 150);
  const auto first = oracle::dft_peak_bin(w.samples);
  const auto second = oracle::dft_peak_bin(w.samples, first);
  const std::size_t lo = std::min(first, second), hi = std::max(first, second);
  CHECK(lo == 15);  // 0.1 * 150
  CHECK(hi == 30);  // 0.2 * 150
}

TEST_CASE("synthesize: matches the direct sum, including a shifted start index") {
  const std::vector<double> a{0.7, 1.3, -0.4}, f{0.037, 0.21, 0.4999};
  const auto w = synthesize(SinusoidSpec{a, f}, 300, 1000);
  const auto ref = oracle::sinusoids(a, f, 300, 1000);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(w.samples[i] - ref[i]) < 1e-9);
}

TEST_CASE("synthesize: zero amplitude gives zeros") {
  const auto w = synthesize(SinusoidSpec{{0.0}, {0.3}}, 10);
  for (double v : w.samples) CHECK(v == 0.0);
}

TEST_CASE("synthesize: invalid spec and sizes") {
  CHECK_THROWS_AS(synthesize(SinusoidSpec{{1.0}, {0.0}}, 10), Error);
  CHECK_THROWS_AS(synthesize(SinusoidSpec{{1.0}, {0.51}}, 10), Error);
  CHECK_THROWS_AS(synthesize(SinusoidSpec{{1.0, 1.0}, {0.2}}, 10), Error);
  CHECK_THROWS_AS(synthesize(SinusoidSpec{{}, {}}, 10), Error);
  CHECK_THROWS_AS(synthesize(SinusoidSpec{{1.0}, {0.2}}, 0), Error);
  try {
    synthesize(SinusoidSpec{{1.0}, {-0.1}}, 10);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
  }
  CHECK_NOTHROW(synthesize(SinusoidSpec{{1.0}, {0.5}}, 10));
}

TEST_CASE("synthesize_complex: real and imaginary parts") {
  const SinusoidSpec spec{{1.0, 0.5}, {0.1, 0.35}};
  const auto c = synthesize_complex(spec, 40);
  for (std::size_t i = 0; i < 40; ++i) {
    const double n = static_cast<double>(i + 1);
    const double re = std::cos(2 * M_PI * 0.1 * n) + 0.5 * std::cos(2 * M_PI * 0.35 * n);
    const double im = std::sin(2 * M_PI * 0.1 * n) + 0.5 * std::sin(2 * M_PI * 0.35 * n);
    CHECK(std::abs(c.real.samples[i] - re) < 1e-12);
    CHECK(std::abs(c.imag.samples[i] - im) < 1e-12);
  }
}

TEST_CASE("add_noise: sigma zero is the identity") {
  const auto clean = synthesize(SinusoidSpec{{1.0}, {0.13}}, 64);
  const auto noisy = add_noise(clean, NoiseSpec::with_sigma(0.0, 5));
  CHECK(noisy.sigma == 0.0);
  CHECK(noisy.window.samples == clean.samples);
}

TEST_CASE("add_noise: sigma inverts the SNR formula") {
  for (double snr : {-10.0, 0.0, 7.5, 15.0, 40.0}) {
    const auto clean = synthesize(SinusoidSpec{{1.0, 0.3}, {0.11, 0.27}}, 150);
    const double sigma = add_noise(clean, NoiseSpec::at_snr(snr, 1)).sigma;
    double energy = 0;
    for (double v : clean.samples) energy += v * v;
    const double realized = 10 * std::log10(energy / (150 * sigma * sigma));
    CHECK(std::abs(realized - snr) < 1e-9);
  }
}

TEST_CASE("add_noise: empirical SNR at large N") {
  const auto clean = synthesize(SinusoidSpec{{1.0, 1.0}, {0.1, 0.2}}, 100000);
  const auto noisy = add_noise(clean, NoiseSpec::at_snr(15.0, 99));
  double energy = 0, noise = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    energy += clean.samples[i] * clean.samples[i];
    const double d = noisy.window.samples[i] - clean.samples[i];
    noise += d * d;
  }
  const double emp = 10 * std::log10(energy / noise);
  CHECK(std::abs(emp - 15.0) < 0.2);
}

TEST_CASE("add_noise: determinism and seed sensitivity") {
  const auto clean = synthesize(SinusoidSpec{{1.0}, {0.3}}, 50);
  const auto a = add_noise(clean, NoiseSpec::at_snr(5, 42));
  const auto b = add_noise(clean, NoiseSpec::at_snr(5, 42));
  const auto c = add_noise(clean, NoiseSpec::at_snr(5, 43));
  CHECK(a.window.samples == b.window.samples);
  CHECK(a.window.samples != c.window.samples);
  CHECK(a.window.start_index == clean.start_index);
}

TEST_CASE("add_noise: SNR on an all-zero window is degenerate") {
  const auto clean = synthesize(SinusoidSpec{{0.0}, {0.3}}, 10);
  try {
    add_noise(clean, NoiseSpec::at_snr(10, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSignal);
  }
  CHECK_THROWS_AS(add_noise(clean, NoiseSpec::with_sigma(-1.0, 1)), Error);
}

TEST_CASE("split and concat") {
  const auto w = synthesize(SinusoidSpec{{1.0}, {0.2}}, 150);
  const auto [a, m] = split(w, 50);
  CHECK(a.size() == 50);
  CHECK(m.size() == 100);
  CHECK(m.start_index == 51);
  CHECK(concat(a, m).samples == w.samples);

  const SampleWindow two{{1.0, 2.0}, 1, Provenance::True};
  const auto [x, y] = split(two, 1);
  CHECK(x.size() == 1);
  CHECK(y.size() == 1);

  CHECK_THROWS_AS(split(w, 0), Error);
  CHECK_THROWS_AS(split(w, 150), Error);

  for (std::size_t k = 1; k < 20; ++k) {
    const auto small = synthesize(SinusoidSpec{{1.0}, {0.31}}, 20, 7);
    const auto [p, q] = split(small, k);
    const auto back = concat(p, q);
    CHECK(back.samples == small.samples);
    CHECK(back.start_index == 7);
    CHECK(back.provenance == Provenance::True);
  }
}

TEST_CASE("concat: provenance and contiguity") {
  const SampleWindow t{std::vector<double>(50, 1.0), 1, Provenance::True};
  const SampleWindow p{std::vector<double>(100, 2.0), 51, Provenance::Predicted};
  const auto c = concat(t, p);
  CHECK(c.size() == 150);
  CHECK(c.provenance == Provenance::Concatenated);
  CHECK(c.samples[49] == 1.0);
  CHECK(c.samples[50] == 2.0);

  const SampleWindow gap{std::vector<double>(3, 0.0), 52, Provenance::True};
  const SampleWindow overlap{std::vector<double>(3, 0.0), 50, Provenance::True};
  try {
    concat(t, gap);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Contiguity);
  }
  CHECK_THROWS_AS(concat(t, overlap), Error);
  const SampleWindow empty{{}, 51, Provenance::True};
  CHECK_THROWS_AS(concat(t, empty), Error);
}

TEST_CASE("synthesis satisfies the analytic order-2L recurrence") {
  const std::vector<double> f{0.05, 0.17, 0.33, 0.41};
  const auto w = synthesize(SinusoidSpec::unit_amplitudes(f), 200);
  const auto model = lp::analytic_model(f);
  REQUIRE(model.order() == 8);
  double worst = 0;
  for (std::size_t n = model.order(); n < w.size(); ++n) {
    double pred = 0;
    for (std::size_t k = 1; k <= model.order(); ++k) pred += model.coeffs[k - 1] * w.samples[n - k];
    worst = std::max(worst, std::abs(pred - w.samples[n]));
  }
  CHECK(worst < 1e-9);
}
