#include "superres/hrse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "superres/error.hpp"

namespace superres::hrse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kZeroAngle = 1e-9;

std::vector<std::complex<double>> polynomial_roots(const VectorXd& lp_coeffs) {
  // Companion matrix of z^p - c_1 z^{p-1} - ... - c_p.
  const auto p = lp_coeffs.size();
  MatrixXd companion = MatrixXd::Zero(p, p);
  companion.row(0) = lp_coeffs.transpose();
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> es(companion, false);
  require(es.info() == Eigen::Success, ErrorKind::NumericalDegeneracy, "companion eigen-solve failed");
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return roots;
}

}  // namespace

HankelConfig default_hankel(std::size_t n, std::size_t l) {
  const std::size_t order = 2 * l;
  std::size_t rows = n / 2;
  rows = std::max(rows, order + 1);
  if (n > order) rows = std::min(rows, n - order);
  return {rows, order};
}

std::vector<double> fold_conjugate_pairs(std::span<const std::complex<double>> roots, std::size_t l,
                                         double pair_tolerance) {
  // (angle, distance of |z| from the unit circle)
  std::vector<std::pair<double, double>> positive;
  std::vector<double> negative;
  std::size_t nyquist = 0;
  for (const auto& z : roots) {
    const double theta = std::arg(z);
    if (std::abs(theta) >= M_PI - kZeroAngle) {
      // Angle pi (f = 0.5) is its own conjugate.
      ++nyquist;
    } else if (theta > kZeroAngle) {
      positive.emplace_back(theta, std::abs(std::abs(z) - 1.0));
    } else if (theta < -kZeroAngle) {
      negative.push_back(-theta);
    }
  }
  std::sort(positive.begin(), positive.end());
  std::vector<bool> used(negative.size(), false);
  std::vector<std::pair<double, double>> freqs;
  for (const auto& [theta, radial] : positive) {
    std::size_t best = negative.size();
    double best_gap = pair_tolerance;
    for (std::size_t j = 0; j < negative.size(); ++j) {
      const double gap = std::abs(negative[j] - theta);
      if (!used[j] && gap <= best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    double folded = theta;
    if (best < negative.size()) {
      used[best] = true;
      folded = 0.5 * (theta + negative[best]);
    }
    freqs.emplace_back(folded / (2.0 * M_PI), radial);
  }
  if (nyquist > 0) freqs.emplace_back(0.5, 0.0);
  if (freqs.size() < l) {
    throw Error(ErrorKind::UnderResolution, "only " + std::to_string(freqs.size()) +
                                                " distinct positive frequencies, " + std::to_string(l) +
                                                " requested");
  }
  // More candidates than l only arise when the model order exceeds 2l;
  // keep the l closest to the unit circle.
  std::stable_sort(freqs.begin(), freqs.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  freqs.resize(l);
  std::vector<double> out;
  for (const auto& f : freqs) out.push_back(f.first);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> power_spectrum(std::span<const double> x, std::size_t grid_size) {
  require(grid_size >= x.size() && grid_size >= 2, ErrorKind::Parameter, "grid_size must be >= window length");
  std::vector<std::complex<double>> twiddle(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    twiddle[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(grid_size));
  }
  const std::size_t half = grid_size / 2;
  std::vector<double> power(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t idx = 0;
    for (double v : x) {
      acc += v * twiddle[idx];
      idx += k;
      if (idx >= grid_size) idx -= grid_size;
    }
    power[k] = std::norm(acc);
  }
  return power;
}

FrequencyEstimate periodogram_estimate(const SampleWindow& window, std::size_t l, const PeriodogramOptions& opts) {
  require(l >= 1, ErrorKind::Parameter, "l must be >= 1");
  const auto power = power_spectrum(window.samples, opts.grid_size);
  const std::size_t half = power.size() - 1;
  auto at = [&](std::ptrdiff_t k) {
    // Real input: the spectrum is mirror-symmetric about 0 and G/2.
    if (k < 0) k = -k;
    if (k > static_cast<std::ptrdiff_t>(half)) k = 2 * static_cast<std::ptrdiff_t>(half) - k;
    return power[static_cast<std::size_t>(k)];
  };
  const double peak = *std::max_element(power.begin() + 1, power.end());
  require(peak > 0.0, ErrorKind::UnderResolution, "flat zero spectrum");
  const double floor = peak * std::pow(10.0, -opts.peak_floor_db / 10.0);

  std::vector<std::size_t> maxima;
  for (std::size_t k = 1; k <= half; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    const double p = power[k];
    if (p >= floor && p > at(i - 1) && p >= at(i + 1)) maxima.push_back(k);
  }
  if (maxima.size() < l) {
    throw Error(ErrorKind::UnderResolution,
                "periodogram found " + std::to_string(maxima.size()) + " peaks, " + std::to_string(l) + " requested");
  }
  std::stable_sort(maxima.begin(), maxima.end(), [&](auto a, auto b) { return power[a] > power[b]; });
  maxima.resize(l);

  FrequencyEstimate est;
  est.method_tag = "periodogram";
  const double g = static_cast<double>(opts.grid_size);
  for (std::size_t k : maxima) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    const double a = std::log(std::max(at(i - 1), 1e-300));
    const double b = std::log(std::max(at(i), 1e-300));
    const double c = std::log(std::max(at(i + 1), 1e-300));
    const double denom = a - 2.0 * b + c;
    double offset = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double f = (static_cast<double>(k) + offset) / g;
    est.frequencies.push_back(std::clamp(f, 0.5 / g, 0.5));
  }
  std::sort(est.frequencies.begin(), est.frequencies.end());
  return est;
}

FrequencyEstimate prony_estimate(const SampleWindow& window, std::size_t l) {
  require(l >= 1, ErrorKind::Parameter, "l must be >= 1");
  const std::size_t p = 2 * l;
  const std::size_t n = window.size();
  require(n >= 2 * p, ErrorKind::Parameter,
          "prony needs at least " + std::to_string(2 * p) + " samples, got " + std::to_string(n));
  const auto rows = static_cast<Eigen::Index>(n - p);
  MatrixXd a(rows, static_cast<Eigen::Index>(p));
  VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = static_cast<std::size_t>(r) + p;
    b(r) = window.samples[t];
    for (std::size_t k = 1; k <= p; ++k) a(r, static_cast<Eigen::Index>(k - 1)) = window.samples[t - k];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  require(qr.rank() == static_cast<Eigen::Index>(p), ErrorKind::NumericalDegeneracy,
          "linear-prediction system has rank " + std::to_string(qr.rank()) + " < " + std::to_string(p));
  const VectorXd c = qr.solve(b);
  const auto roots = polynomial_roots(c);
  FrequencyEstimate est;
  est.method_tag = "prony";
  try {
    est.frequencies = fold_conjugate_pairs(roots, l, 1e-2 * 2.0 * M_PI);
  } catch (const Error& e) {
    throw Error(ErrorKind::NumericalDegeneracy, std::string("prony roots: ") + e.what());
  }
  return est;
}

std::vector<std::complex<double>> esprit_eigenvalues(std::span<const double> x, const HankelConfig& cfg) {
  const std::size_t n = x.size();
  const std::size_t w = cfg.rows;
  const std::size_t r = cfg.model_order;
  require(r >= 1, ErrorKind::Config, "model order must be >= 1");
  require(w >= r + 1 && w <= n && n - w + 1 >= r, ErrorKind::Config,
          "Hankel rows " + std::to_string(w) + " cannot host a rank-" + std::to_string(r) + " subspace for " +
              std::to_string(n) + " samples");
  const auto rows = static_cast<Eigen::Index>(w);
  const auto cols = static_cast<Eigen::Index>(n - w + 1);
  MatrixXd hankel(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) hankel(i, j) = x[static_cast<std::size_t>(i + j)];

  Eigen::BDCSVD<MatrixXd> svd(hankel, Eigen::ComputeThinU);
  const auto order = static_cast<Eigen::Index>(r);
  const MatrixXd signal = svd.matrixU().leftCols(order);
  const MatrixXd upper = signal.topRows(rows - 1);
  const MatrixXd lower = signal.bottomRows(rows - 1);
  // Least-squares rotational invariance: upper * psi ~= lower.
  const MatrixXd psi = upper.colPivHouseholderQr().solve(lower);
  Eigen::EigenSolver<MatrixXd> es(psi, false);
  require(es.info() == Eigen::Success, ErrorKind::NumericalDegeneracy, "ESPRIT eigen-solve failed");
  std::vector<std::complex<double>> eig(r);
  for (Eigen::Index i = 0; i < order; ++i) eig[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return eig;
}

FrequencyEstimate esprit_estimate(const SampleWindow& window, std::size_t l, const EspritOptions& opts) {
  require(l >= 1, ErrorKind::Parameter, "l must be >= 1");
  require(window.size() >= 4 * l + 1, ErrorKind::Config,
          "ESPRIT needs at least " + std::to_string(4 * l + 1) + " samples for l = " + std::to_string(l));
  const HankelConfig cfg = opts.hankel.value_or(default_hankel(window.size(), l));
  require(cfg.model_order >= 2 * l, ErrorKind::Config, "model order below 2l");
  const auto eig = esprit_eigenvalues(window.samples, cfg);
  FrequencyEstimate est;
  est.method_tag = "esprit";
  est.frequencies = fold_conjugate_pairs(eig, l, opts.pair_tolerance);
  return est;
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::Esprit: return "esprit";
    case Estimator::Prony: return "prony";
    case Estimator::Periodogram: return "periodogram";
  }
  return "?";
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "esprit") return Estimator::Esprit;
  if (s == "prony") return Estimator::Prony;
  if (s == "periodogram") return Estimator::Periodogram;
  throw Error(ErrorKind::Parameter, "unknown estimator '" + s + "'");
}

FrequencyEstimate estimate(Estimator e, const SampleWindow& window, std::size_t l) {
  switch (e) {
    case Estimator::Esprit: return esprit_estimate(window, l);
    case Estimator::Prony: return prony_estimate(window, l);
    case Estimator::Periodogram: return periodogram_estimate(window, l);
  }
  throw Error(ErrorKind::Parameter, "unknown estimator");
}

}  // namespace superres::hrse
