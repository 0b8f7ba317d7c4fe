#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "superres/error.hpp"
#include "superres/metrics.hpp"
#include "superres/rng.hpp"

using namespace superres;
using V = std::vector<double>;

TEST_CASE("match_frequencies: sort and zip") {
  using P = std::vector<std::pair<double, double>>;
  CHECK(metrics::match_frequencies(V{0.2, 0.1}, V{0.1, 0.2}) == P{{0.1, 0.1}, {0.2, 0.2}});
  CHECK(metrics::match_frequencies(V{0.3}, V{0.31}) == P{{0.3, 0.31}});
  CHECK(metrics::match_frequencies(V{0.1, 0.4}, V{0.39, 0.11}) == P{{0.1, 0.11}, {0.4, 0.39}});
}

TEST_CASE("match_frequencies: cardinality errors") {
  try {
    metrics::match_frequencies(V{0.1, 0.2}, V{0.1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Cardinality);
  }
  CHECK_THROWS_AS(metrics::match_frequencies(V{}, V{}), Error);
}

TEST_CASE("nmse: hand arithmetic") {
  CHECK(metrics::nmse(V{0.1, 0.2}, V{0.1, 0.2}) == 0.0);
  CHECK(std::abs(metrics::nmse(V{0.2}, V{0.25}) - 0.0625) < 1e-12);
  CHECK(std::abs(metrics::nmse(V{0.1, 0.3}, V{0.12, 0.29}) - 0.005) < 1e-12);
}

TEST_CASE("nmse: degenerate truth") {
  try {
    metrics::nmse(V{0.0, 0.0}, V{0.1, 0.2});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMetric);
  }
}

TEST_CASE("nmse: agrees with the definition and is permutation invariant") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform_int(0, 3));
    V truth(k), est(k);
    for (std::size_t i = 0; i < k; ++i) {
      truth[i] = rng.uniform(0.01, 0.5);
      est[i] = rng.uniform(0.01, 0.5);
    }
    const double got = metrics::nmse(truth, est);
    CHECK(oracle::rel_error(got, oracle::nmse(truth, est), 1e-300) < 1e-12);
    CHECK(metrics::nmse(truth, truth) == 0.0);
    V pt = truth, pe = est;
    std::reverse(pt.begin(), pt.end());
    std::rotate(pe.begin(), pe.begin() + static_cast<long>(k / 2), pe.end());
    CHECK(metrics::nmse(pt, pe) == got);
    CHECK(got >= 0.0);
  }
}

TEST_CASE("nmse_db: mean of linear values, then dB") {
  CHECK(std::abs(metrics::nmse_db(V{0.01}) - (-20.0)) < 1e-12);
  CHECK(std::abs(metrics::nmse_db(V{0.1, 0.001}) - 10 * std::log10(0.0505)) < 1e-12);
  CHECK(std::abs(metrics::nmse_db(V{0.1, 0.001}) - (-12.967)) < 1e-3);
  const double floor = metrics::nmse_db(V{0.0, 0.0});
  CHECK(std::isinf(floor));
  CHECK(floor < 0);
  CHECK_THROWS_AS(metrics::nmse_db(V{}), Error);
  CHECK_THROWS_AS(metrics::nmse_db(V{-0.1}), Error);
}
