#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "superres/nn/kernels.hpp"

namespace superres::nn::kernels::parallel {

namespace {

// Valid output range [lo, hi) for tap k: t + k - pad must land in [0, len).
inline void tap_range(std::ptrdiff_t k, std::ptrdiff_t pad, std::ptrdiff_t len, std::ptrdiff_t& lo,
                      std::ptrdiff_t& hi) {
  lo = std::max<std::ptrdiff_t>(0, pad - k);
  hi = std::min<std::ptrdiff_t>(len, len + pad - k);
}

}  // namespace

void conv1d_forward(const ConvDims& d, std::span<const double> in, std::span<const double> w,
                    std::span<const double> b, std::span<double> out) {
  const auto pad = static_cast<std::ptrdiff_t>(same_pad_left(d.kernel));
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  const auto jobs = static_cast<std::int64_t>(d.batch * d.filters);
#pragma omp parallel for schedule(static)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto n = static_cast<std::size_t>(job) / d.filters;
    const auto f = static_cast<std::size_t>(job) % d.filters;
    double* y = out.data() + (n * d.filters + f) * d.length;
    std::fill(y, y + d.length, b[f]);
    for (std::size_t c = 0; c < d.in_channels; ++c) {
      const double* x = in.data() + (n * d.in_channels + c) * d.length;
      const double* wk = w.data() + (f * d.in_channels + c) * d.kernel;
      for (std::size_t k = 0; k < d.kernel; ++k) {
        std::ptrdiff_t lo, hi;
        const auto kk = static_cast<std::ptrdiff_t>(k);
        tap_range(kk, pad, len, lo, hi);
        const double wv = wk[k];
        const double* xs = x + kk - pad;
        for (std::ptrdiff_t t = lo; t < hi; ++t) y[t] += wv * xs[t];
      }
    }
  }
}

void conv1d_backward(const ConvDims& d, std::span<const double> in, std::span<const double> w,
                     std::span<const double> dout, std::span<double> dw, std::span<double> db,
                     std::span<double> din) {
  const auto pad = static_cast<std::ptrdiff_t>(same_pad_left(d.kernel));
  const auto len = static_cast<std::ptrdiff_t>(d.length);
  const auto filters = static_cast<std::int64_t>(d.filters);

  // Weight/bias gradients: one thread per filter, batch reduced in order.
#pragma omp parallel for schedule(static)
  for (std::int64_t fi = 0; fi < filters; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    for (std::size_t n = 0; n < d.batch; ++n) {
      const double* g = dout.data() + (n * d.filters + f) * d.length;
      double bsum = 0.0;
      for (std::ptrdiff_t t = 0; t < len; ++t) bsum += g[t];
      db[f] += bsum;
      for (std::size_t c = 0; c < d.in_channels; ++c) {
        const double* x = in.data() + (n * d.in_channels + c) * d.length;
        double* dwk = dw.data() + (f * d.in_channels + c) * d.kernel;
        for (std::size_t k = 0; k < d.kernel; ++k) {
          std::ptrdiff_t lo, hi;
          const auto kk = static_cast<std::ptrdiff_t>(k);
          tap_range(kk, pad, len, lo, hi);
          const double* xs = x + kk - pad;
          double acc = 0.0;
          for (std::ptrdiff_t t = lo; t < hi; ++t) acc += g[t] * xs[t];
          dwk[k] += acc;
        }
      }
    }
  }

  if (din.empty()) return;
  // Input gradient: one thread per (example, input channel).
  const auto jobs = static_cast<std::int64_t>(d.batch * d.in_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto n = static_cast<std::size_t>(job) / d.in_channels;
    const auto c = static_cast<std::size_t>(job) % d.in_channels;
    double* dx = din.data() + (n * d.in_channels + c) * d.length;
    std::fill(dx, dx + d.length, 0.0);
    for (std::size_t f = 0; f < d.filters; ++f) {
      const double* g = dout.data() + (n * d.filters + f) * d.length;
      const double* wk = w.data() + (f * d.in_channels + c) * d.kernel;
      for (std::size_t k = 0; k < d.kernel; ++k) {
        std::ptrdiff_t lo, hi;
        const auto kk = static_cast<std::ptrdiff_t>(k);
        tap_range(kk, pad, len, lo, hi);
        const double wv = wk[k];
        double* dxs = dx + kk - pad;
        for (std::ptrdiff_t t = lo; t < hi; ++t) dxs[t] += wv * g[t];
      }
    }
  }
}

void dense_forward(const DenseDims& d, std::span<const double> in, std::span<const double> w,
                   std::span<const double> b, std::span<double> out) {
  const auto jobs = static_cast<std::int64_t>(d.batch * d.units);
#pragma omp parallel for schedule(static)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto n = static_cast<std::size_t>(job) / d.units;
    const auto u = static_cast<std::size_t>(job) % d.units;
    const double* x = in.data() + n * d.in_features;
    const double* wu = w.data() + u * d.in_features;
    double acc = 0.0;
    for (std::size_t i = 0; i < d.in_features; ++i) acc += wu[i] * x[i];
    out[n * d.units + u] = b[u] + acc;
  }
}

void dense_backward(const DenseDims& d, std::span<const double> in, std::span<const double> w,
                    std::span<const double> dout, std::span<double> dw, std::span<double> db,
                    std::span<double> din) {
  const auto units = static_cast<std::int64_t>(d.units);
#pragma omp parallel for schedule(static)
  for (std::int64_t ui = 0; ui < units; ++ui) {
    const auto u = static_cast<std::size_t>(ui);
    double* dwu = dw.data() + u * d.in_features;
    for (std::size_t n = 0; n < d.batch; ++n) {
      const double g = dout[n * d.units + u];
      db[u] += g;
      const double* x = in.data() + n * d.in_features;
      for (std::size_t i = 0; i < d.in_features; ++i) dwu[i] += g * x[i];
    }
  }

  if (din.empty()) return;
  const auto batch = static_cast<std::int64_t>(d.batch);
#pragma omp parallel for schedule(static)
  for (std::int64_t ni = 0; ni < batch; ++ni) {
    const auto n = static_cast<std::size_t>(ni);
    double* dx = din.data() + n * d.in_features;
    std::fill(dx, dx + d.in_features, 0.0);
    for (std::size_t u = 0; u < d.units; ++u) {
      const double g = dout[n * d.units + u];
      const double* wu = w.data() + u * d.in_features;
      for (std::size_t i = 0; i < d.in_features; ++i) dx[i] += g * wu[i];
    }
  }
}

void relu_forward(std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double& v = x[static_cast<std::size_t>(i)];
    v = v > 0.0 ? v : 0.0;
  }
}

void relu_backward(std::span<const double> activated, std::span<double> grad) {
  const auto n = static_cast<std::int64_t>(grad.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (activated[j] <= 0.0) grad[j] = 0.0;
  }
}

}  // namespace superres::nn::kernels::parallel
