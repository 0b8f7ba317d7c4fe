#include "superres/signal.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "superres/error.hpp"
#include "superres/rng.hpp"

namespace superres {

void SinusoidSpec::validate() const {
  require(!frequencies.empty(), ErrorKind::Parameter, "sinusoid spec needs L >= 1");
  require(amplitudes.size() == frequencies.size(), ErrorKind::Parameter,
          "amplitude count " + std::to_string(amplitudes.size()) + " != frequency count " +
              std::to_string(frequencies.size()));
  for (double f : frequencies) {
    require(std::isfinite(f) && f > 0.0 && f <= 0.5, ErrorKind::Parameter,
            "frequency " + std::to_string(f) + " outside (0, 0.5]");
  }
  for (double a : amplitudes) require(std::isfinite(a), ErrorKind::Parameter, "non-finite amplitude");
}

SinusoidSpec SinusoidSpec::unit_amplitudes(std::vector<double> freqs) {
  SinusoidSpec s;
  s.amplitudes.assign(freqs.size(), 1.0);
  s.frequencies = std::move(freqs);
  return s;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::True: return "true";
    case Provenance::Predicted: return "predicted";
    case Provenance::Concatenated: return "concatenated";
  }
  return "?";
}

double SampleWindow::energy() const noexcept {
  return std::inner_product(samples.begin(), samples.end(), samples.begin(), 0.0);
}

SampleWindow synthesize(const SinusoidSpec& spec, std::size_t n_samples, std::int64_t start_index) {
  spec.validate();
  require(n_samples >= 1, ErrorKind::Parameter, "n_samples must be >= 1");
  SampleWindow w;
  w.start_index = start_index;
  w.provenance = Provenance::True;
  w.samples.assign(n_samples, 0.0);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double n = static_cast<double>(start_index + static_cast<std::int64_t>(k));
    double acc = 0.0;
    for (std::size_t l = 0; l < spec.count(); ++l) {
      // Reduce the phase modulo one cycle before scaling by 2 pi so large n
      // keeps full precision.
      const double cycles = std::fmod(spec.frequencies[l] * n, 1.0);
      acc += spec.amplitudes[l] * std::sin(2.0 * M_PI * cycles);
    }
    w.samples[k] = acc;
  }
  return w;
}

ComplexWindow synthesize_complex(const SinusoidSpec& spec, std::size_t n_samples, std::int64_t start_index) {
  spec.validate();
  require(n_samples >= 1, ErrorKind::Parameter, "n_samples must be >= 1");
  ComplexWindow out;
  out.real.start_index = out.imag.start_index = start_index;
  out.real.samples.assign(n_samples, 0.0);
  out.imag.samples.assign(n_samples, 0.0);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double n = static_cast<double>(start_index + static_cast<std::int64_t>(k));
    for (std::size_t l = 0; l < spec.count(); ++l) {
      const double phase = 2.0 * M_PI * std::fmod(spec.frequencies[l] * n, 1.0);
      out.real.samples[k] += spec.amplitudes[l] * std::cos(phase);
      out.imag.samples[k] += spec.amplitudes[l] * std::sin(phase);
    }
  }
  return out;
}

double sigma_for_snr(const SampleWindow& clean, double snr_db) {
  require(std::isfinite(snr_db), ErrorKind::Parameter, "snr_db must be finite");
  const double energy = clean.energy();
  require(energy > 0.0, ErrorKind::DegenerateSignal, "SNR requested on an all-zero window");
  const double n = static_cast<double>(clean.size());
  return std::sqrt(energy / (n * std::pow(10.0, snr_db / 10.0)));
}

NoisyWindow add_noise(const SampleWindow& clean, const NoiseSpec& noise) {
  double sigma = 0.0;
  if (noise.snr_db) {
    sigma = sigma_for_snr(clean, *noise.snr_db);
  } else if (noise.sigma) {
    sigma = *noise.sigma;
    require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::Parameter, "sigma must be >= 0");
  } else {
    throw Error(ErrorKind::Parameter, "noise spec needs snr_db or sigma");
  }
  NoisyWindow out{clean, sigma};
  if (sigma == 0.0) return out;
  Rng rng(noise.seed);
  for (double& x : out.window.samples) x += sigma * rng.normal();
  return out;
}

std::pair<SampleWindow, SampleWindow> split(const SampleWindow& window, std::size_t m) {
  require(m >= 1 && m < window.size(), ErrorKind::Parameter,
          "split point " + std::to_string(m) + " outside [1, " + std::to_string(window.size()) + ")");
  SampleWindow head{{window.samples.begin(), window.samples.begin() + static_cast<std::ptrdiff_t>(m)},
                    window.start_index,
                    window.provenance};
  SampleWindow tail{{window.samples.begin() + static_cast<std::ptrdiff_t>(m), window.samples.end()},
                    window.start_index + static_cast<std::int64_t>(m),
                    window.provenance};
  return {std::move(head), std::move(tail)};
}

SampleWindow concat(const SampleWindow& a, const SampleWindow& b) {
  require(!a.samples.empty() && !b.samples.empty(), ErrorKind::Parameter, "cannot concatenate empty windows");
  require(b.start_index == a.end_index(), ErrorKind::Contiguity,
          "window starting at " + std::to_string(b.start_index) + " does not follow window ending at " +
              std::to_string(a.end_index() - 1));
  SampleWindow out;
  out.start_index = a.start_index;
  out.provenance = a.provenance == b.provenance ? a.provenance : Provenance::Concatenated;
  out.samples.reserve(a.size() + b.size());
  out.samples.insert(out.samples.end(), a.samples.begin(), a.samples.end());
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

}  // namespace superres
