#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace superres {

/// Estimator output: frequencies sorted ascending, one per requested component.
struct FrequencyEstimate {
  std::vector<double> frequencies;
  std::string method_tag;
};

namespace metrics {

/// Pairs truth and estimate by sorting both ascending and zipping.
/// Throws ErrorKind::Cardinality on length mismatch or empty input.
std::vector<std::pair<double, double>> match_frequencies(std::span<const double> truth,
                                                         std::span<const double> estimate);

/// Normalized MSE, (1/K sum (f_k - f~_k)^2) / (1/K sum f_k^2), after sorted matching.
double nmse(std::span<const double> truth, std::span<const double> estimate);

/// 10 log10 of the mean of linear NMSE values. Returns -infinity when the
/// mean is exactly zero; callers print that as the "-inf" floor sentinel.
double nmse_db(std::span<const double> values);

}  // namespace metrics
}  // namespace superres
