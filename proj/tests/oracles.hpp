#pragma once

// Independent reference computations used as test oracles. Kept deliberately
// naive: direct sums, no shared code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

/// |sum_n x(n) e^{-j 2 pi f n}|^2 with n starting at 1.
inline double dft_power(const std::vector<double>& x, double f) {
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    acc += x[i] * std::polar(1.0, -2.0 * M_PI * f * n);
  }
  return std::norm(acc);
}

/// Bin k/len with the largest DFT power over 1 <= k < len/2, excluding `skip`.
inline std::size_t dft_peak_bin(const std::vector<double>& x, std::size_t skip = 0) {
  std::size_t best = 1;
  double best_p = -1;
  for (std::size_t k = 1; 2 * k <= x.size(); ++k) {
    if (k == skip) continue;
    const double p = dft_power(x, static_cast<double>(k) / static_cast<double>(x.size()));
    if (p > best_p) {
      best_p = p;
      best = k;
    }
  }
  return best;
}

inline std::vector<double> sinusoids(const std::vector<double>& a, const std::vector<double>& f, std::size_t n,
                                     long start = 1) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < f.size(); ++l)
      x[i] += a[l] * std::sin(2.0 * M_PI * f[l] * static_cast<double>(start + static_cast<long>(i)));
  return x;
}

/// Normalized MSE straight from its definition.
inline double nmse(std::vector<double> t, std::vector<double> e) {
  std::sort(t.begin(), t.end());
  std::sort(e.begin(), e.end());
  double num = 0, den = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    num += (t[k] - e[k]) * (t[k] - e[k]);
    den += t[k] * t[k];
  }
  return (num / static_cast<double>(t.size())) / (den / static_cast<double>(t.size()));
}

inline double rel_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
