#include "superres/linear_predictor.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "superres/error.hpp"

namespace superres::lp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LPFit fit_lp(const SampleWindow& window, std::size_t order) {
  require(order >= 1, ErrorKind::Parameter, "order must be >= 1");
  const std::size_t n = window.size();
  require(n >= 2 * order, ErrorKind::Parameter,
          "fit_lp needs at least " + std::to_string(2 * order) + " samples, got " + std::to_string(n));
  const auto rows = static_cast<Eigen::Index>(n - order);
  const auto cols = static_cast<Eigen::Index>(order);
  MatrixXd a(rows, cols);
  VectorXd b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = static_cast<std::size_t>(r) + order;
    b(r) = window.samples[t];
    for (std::size_t k = 1; k <= order; ++k) a(r, static_cast<Eigen::Index>(k - 1)) = window.samples[t - k];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  require(qr.rank() == cols, ErrorKind::NumericalDegeneracy,
          "prediction matrix rank " + std::to_string(qr.rank()) + " below order " + std::to_string(order));
  const VectorXd c = qr.solve(b);
  LPFit fit;
  fit.model.coeffs.assign(c.data(), c.data() + c.size());
  fit.residual = (a * c - b).squaredNorm();
  return fit;
}

namespace {

std::vector<double> stabilized(const std::vector<double>& coeffs) {
  const auto p = static_cast<Eigen::Index>(coeffs.size());
  MatrixXd companion = MatrixXd::Zero(p, p);
  for (Eigen::Index k = 0; k < p; ++k) companion(0, k) = coeffs[static_cast<std::size_t>(k)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> es(companion, false);
  require(es.info() == Eigen::Success, ErrorKind::NumericalDegeneracy, "root projection failed");
  // Rebuild prod (z - r_i) from unit-modulus roots.
  std::vector<std::complex<double>> poly{1.0};
  for (Eigen::Index i = 0; i < p; ++i) {
    std::complex<double> r = es.eigenvalues()[i];
    if (std::abs(r) > 0.0) r /= std::abs(r);
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j] += poly[j];
      next[j + 1] -= r * poly[j];
    }
    poly = std::move(next);
  }
  std::vector<double> out(coeffs.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -poly[k + 1].real();
  return out;
}

}  // namespace

SampleWindow extrapolate(const LPModel& model, const SampleWindow& window, std::size_t horizon,
                         const ExtrapolateOptions& opts) {
  const std::size_t order = model.order();
  require(order >= 1, ErrorKind::Parameter, "empty model");
  require(horizon >= 1, ErrorKind::Parameter, "horizon must be >= 1");
  require(window.size() >= order, ErrorKind::Parameter, "window shorter than model order");
  const std::vector<double> coeffs = opts.stabilize ? stabilized(model.coeffs) : model.coeffs;

  std::vector<double> history(window.samples.end() - static_cast<std::ptrdiff_t>(order), window.samples.end());
  history.reserve(order + horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = order + h;
    double next = 0.0;
    for (std::size_t k = 1; k <= order; ++k) next += coeffs[k - 1] * history[t - k];
    history.push_back(next);
  }
  SampleWindow out;
  out.samples.assign(history.begin() + static_cast<std::ptrdiff_t>(order), history.end());
  out.start_index = window.end_index();
  out.provenance = Provenance::Predicted;
  return out;
}

LPModel analytic_model(const std::vector<double>& frequencies) {
  require(!frequencies.empty(), ErrorKind::Parameter, "need at least one frequency");
  // Characteristic polynomial in z^-1, starting from 1.
  std::vector<double> poly{1.0};
  for (double f : frequencies) {
    const double quad[3] = {1.0, -2.0 * std::cos(2.0 * M_PI * f), 1.0};
    std::vector<double> next(poly.size() + 2, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j)
      for (std::size_t q = 0; q < 3; ++q) next[j + q] += poly[j] * quad[q];
    poly = std::move(next);
  }
  LPModel m;
  m.coeffs.resize(poly.size() - 1);
  for (std::size_t k = 0; k < m.coeffs.size(); ++k) m.coeffs[k] = -poly[k + 1];
  return m;
}

}  // namespace superres::lp
