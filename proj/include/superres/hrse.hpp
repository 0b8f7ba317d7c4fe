#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "superres/metrics.hpp"
#include "superres/signal.hpp"

namespace superres::hrse {

/// Hankel data-matrix shape for ESPRIT. model_order counts complex
/// exponentials, so a real L-sinusoid mixture needs model_order = 2L.
struct HankelConfig {
  std::size_t rows = 0;
  std::size_t model_order = 0;
};

/// floor(n/2) clamped to [2L+1, n-2L].
HankelConfig default_hankel(std::size_t n, std::size_t l);

struct PeriodogramOptions {
  std::size_t grid_size = 4096;
  /// Local maxima weaker than the strongest peak by more than this are
  /// treated as sidelobes and ignored.
  double peak_floor_db = 10.0;
};

FrequencyEstimate periodogram_estimate(const SampleWindow& window, std::size_t l,
                                       const PeriodogramOptions& opts = {});

/// Power spectrum |X(k/G)|^2 for k = 0 .. G/2 of the zero-padded window.
std::vector<double> power_spectrum(std::span<const double> x, std::size_t grid_size);

FrequencyEstimate prony_estimate(const SampleWindow& window, std::size_t l);

struct EspritOptions {
  std::optional<HankelConfig> hankel;
  /// Conjugate-pair matching tolerance on |angle| in radians.
  double pair_tolerance = 1e-2 * 2.0 * M_PI;
};

FrequencyEstimate esprit_estimate(const SampleWindow& window, std::size_t l, const EspritOptions& opts = {});

/// Raw eigenvalues of the rotational-invariance operator, before folding.
std::vector<std::complex<double>> esprit_eigenvalues(std::span<const double> x, const HankelConfig& cfg);

/// Folds eigenvalues/roots z to f = |arg z| / (2 pi), merging conjugate
/// pairs greedily by angle proximity. Throws UnderResolution when fewer
/// than l strictly positive frequencies survive.
std::vector<double> fold_conjugate_pairs(std::span<const std::complex<double>> roots, std::size_t l,
                                         double pair_tolerance);

enum class Estimator { Esprit, Prony, Periodogram };

const char* to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

FrequencyEstimate estimate(Estimator e, const SampleWindow& window, std::size_t l);

}  // namespace superres::hrse
