#include "superres/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "superres/error.hpp"

namespace superres::metrics {

std::vector<std::pair<double, double>> match_frequencies(std::span<const double> truth,
                                                         std::span<const double> estimate) {
  require(!truth.empty() && truth.size() == estimate.size(), ErrorKind::Cardinality,
          "truth has " + std::to_string(truth.size()) + " frequencies, estimate has " +
              std::to_string(estimate.size()));
  std::vector<double> t(truth.begin(), truth.end());
  std::vector<double> e(estimate.begin(), estimate.end());
  std::sort(t.begin(), t.end());
  std::sort(e.begin(), e.end());
  std::vector<std::pair<double, double>> pairs(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) pairs[k] = {t[k], e[k]};
  return pairs;
}

double nmse(std::span<const double> truth, std::span<const double> estimate) {
  const auto pairs = match_frequencies(truth, estimate);
  double err = 0.0;
  double ref = 0.0;
  for (const auto& [f, g] : pairs) {
    err += (f - g) * (f - g);
    ref += f * f;
  }
  require(ref > 0.0, ErrorKind::DegenerateMetric, "all-zero truth frequencies");
  // The 1/K factors cancel.
  return err / ref;
}

double nmse_db(std::span<const double> values) {
  require(!values.empty(), ErrorKind::Parameter, "nmse_db of an empty list");
  double sum = 0.0;
  for (double v : values) {
    require(v >= 0.0, ErrorKind::Parameter, "negative NMSE value");
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  if (mean == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mean);
}

}  // namespace superres::metrics
