#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace superres {

/// Ground-truth mixture parameters: x(n) = sum_l a_l sin(2 pi f_l n).
struct SinusoidSpec {
  std::vector<double> amplitudes;
  std::vector<double> frequencies;  // normalized, cycles/sample, each in (0, 0.5]

  std::size_t count() const noexcept { return frequencies.size(); }

  /// Throws ErrorKind::Parameter when the invariants do not hold.
  void validate() const;

  static SinusoidSpec unit_amplitudes(std::vector<double> freqs);
};

enum class Provenance { True, Predicted, Concatenated };

const char* to_string(Provenance p);

/// Contiguous run of real samples x(start_index) .. x(start_index + size - 1).
/// Sample indices are 1-based to match the signal model.
struct SampleWindow {
  std::vector<double> samples;
  std::int64_t start_index = 1;
  Provenance provenance = Provenance::True;

  std::size_t size() const noexcept { return samples.size(); }
  std::int64_t end_index() const noexcept {
    return start_index + static_cast<std::int64_t>(samples.size());
  }
  double energy() const noexcept;
};

enum class SignalModel { RealSin, ComplexExp };

/// ComplexExp output: real and imaginary parts as parallel windows.
struct ComplexWindow {
  SampleWindow real;
  SampleWindow imag;
};

/// Exactly one of snr_db / sigma is authoritative; snr_db wins when both are set.
struct NoiseSpec {
  std::optional<double> snr_db;
  std::optional<double> sigma;
  std::uint64_t seed = 0;

  static NoiseSpec at_snr(double snr_db, std::uint64_t seed) { return {snr_db, std::nullopt, seed}; }
  static NoiseSpec with_sigma(double sigma, std::uint64_t seed) { return {std::nullopt, sigma, seed}; }
};

struct NoisyWindow {
  SampleWindow window;
  double sigma = 0.0;
};

SampleWindow synthesize(const SinusoidSpec& spec, std::size_t n_samples, std::int64_t start_index = 1);

ComplexWindow synthesize_complex(const SinusoidSpec& spec, std::size_t n_samples,
                                 std::int64_t start_index = 1);

/// Noise std-dev giving the requested SNR for the given clean window,
/// sigma^2 = ||x||^2 / (N 10^(snr/10)).
double sigma_for_snr(const SampleWindow& clean, double snr_db);

NoisyWindow add_noise(const SampleWindow& clean, const NoiseSpec& noise);

std::pair<SampleWindow, SampleWindow> split(const SampleWindow& window, std::size_t m);

SampleWindow concat(const SampleWindow& a, const SampleWindow& b);

}  // namespace superres
