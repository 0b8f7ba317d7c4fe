// Reference vs OpenMP layer kernels at the predictor's training shapes.
// Usage: bench_kernels [repeats] [batch]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "superres/nn/kernels.hpp"
#include "superres/rng.hpp"

using namespace superres::nn::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, superres::Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void report(const char* name, double ref_ms, double par_ms, double diff) {
  std::printf("%-22s %10.3f %10.3f %8.2fx   max|diff| %.3g\n", name, ref_ms, par_ms, ref_ms / par_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 20;
  const std::size_t batch = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 50;
  superres::Rng rng(7);

  std::printf("threads %d, batch %zu, repeats %d\n", omp_get_max_threads(), batch, repeats);
  std::printf("%-22s %10s %10s %9s\n", "kernel", "ref ms", "omp ms", "speedup");

  // Second conv layer of the default predictor: 32 -> 64 channels, k = 7, M = 50.
  const ConvDims cd{batch, 32, 64, 50, 7};
  const auto cin = random_vec(cd.batch * cd.in_channels * cd.length, rng);
  const auto cw = random_vec(cd.filters * cd.in_channels * cd.kernel, rng);
  const auto cb = random_vec(cd.filters, rng);
  const auto cdout = random_vec(cd.batch * cd.filters * cd.length, rng);
  std::vector<double> out_r(cd.batch * cd.filters * cd.length), out_p(out_r.size());
  report("conv1d_forward", time_ms([&] { reference::conv1d_forward(cd, cin, cw, cb, out_r); }, repeats),
         time_ms([&] { parallel::conv1d_forward(cd, cin, cw, cb, out_p); }, repeats), max_abs_diff(out_r, out_p));

  std::vector<double> dw_r(cw.size()), db_r(cb.size()), din_r(cin.size());
  std::vector<double> dw_p(cw.size()), db_p(cb.size()), din_p(cin.size());
  const double tr = time_ms([&] { reference::conv1d_backward(cd, cin, cw, cdout, dw_r, db_r, din_r); }, repeats);
  const double tp = time_ms([&] { parallel::conv1d_backward(cd, cin, cw, cdout, dw_p, db_p, din_p); }, repeats);
  report("conv1d_backward", tr, tp, max_abs_diff(din_r, din_p));

  // Output layer: flatten(64 x 50) -> 100 units.
  const DenseDims dd{batch, 64 * 50, 100};
  const auto din = random_vec(dd.batch * dd.in_features, rng);
  const auto dwt = random_vec(dd.units * dd.in_features, rng);
  const auto dbs = random_vec(dd.units, rng);
  const auto ddout = random_vec(dd.batch * dd.units, rng);
  std::vector<double> dout_r(dd.batch * dd.units), dout_p(dout_r.size());
  report("dense_forward", time_ms([&] { reference::dense_forward(dd, din, dwt, dbs, dout_r); }, repeats),
         time_ms([&] { parallel::dense_forward(dd, din, dwt, dbs, dout_p); }, repeats),
         max_abs_diff(dout_r, dout_p));

  std::vector<double> gw_r(dwt.size()), gb_r(dbs.size()), gi_r(din.size());
  std::vector<double> gw_p(dwt.size()), gb_p(dbs.size()), gi_p(din.size());
  const double dr = time_ms([&] { reference::dense_backward(dd, din, dwt, ddout, gw_r, gb_r, gi_r); }, repeats);
  const double dp = time_ms([&] { parallel::dense_backward(dd, din, dwt, ddout, gw_p, gb_p, gi_p); }, repeats);
  report("dense_backward", dr, dp, max_abs_diff(gi_r, gi_p));
  return 0;
}
