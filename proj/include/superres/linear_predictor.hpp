#pragma once

#include <cstddef>
#include <vector>

#include "superres/signal.hpp"

namespace superres::lp {

/// x(n) = sum_{k=1..order} coeffs[k-1] * x(n-k)
struct LPModel {
  std::vector<double> coeffs;

  std::size_t order() const noexcept { return coeffs.size(); }
};

struct LPFit {
  LPModel model;
  /// Sum of squared one-step prediction errors over the fitted range.
  double residual = 0.0;
};

/// Least-squares fit over every n in [order+1, N]. Uses column-pivoted QR;
/// throws NumericalDegeneracy when the numerical rank is below order.
LPFit fit_lp(const SampleWindow& window, std::size_t order);

struct ExtrapolateOptions {
  /// Project characteristic roots onto the unit circle before recursing.
  bool stabilize = false;
};

/// Runs the recursion forward from the last `order` samples of the window.
SampleWindow extrapolate(const LPModel& model, const SampleWindow& window, std::size_t horizon,
                         const ExtrapolateOptions& opts = {});

/// Coefficients of the exact recurrence of order 2L satisfied by a noiseless
/// real mixture: prod_l (1 - 2 cos(2 pi f_l) z^-1 + z^-2).
LPModel analytic_model(const std::vector<double>& frequencies);

}  // namespace superres::lp
