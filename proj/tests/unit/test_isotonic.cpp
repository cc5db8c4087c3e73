#include <doctest.h>

#include <cmath>
#include <random>

#include "fhslab/isotonic.hpp"

using namespace fhslab;

namespace {

double wdist2(const std::vector<double>& a, const std::vector<double>& b,
              const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] + 1e-13) return false;
  return true;
}

// exhaustive oracle: every partition of [0,n) into consecutive blocks whose
// weighted means are non-increasing is a feasible candidate; the projection
// is the best of them
std::vector<double> brute_projection(const std::vector<double>& v,
                                     const std::vector<double>& w) {
  const std::size_t n = v.size();
  std::vector<double> best;
  double best_cost = 1e300;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<double> cand(n);
    std::size_t start = 0;
    bool feasible = true;
    double prev = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      const bool cut = i + 1 == n || (mask >> i) & 1u;
      if (!cut) continue;
      double sw = 0.0, sv = 0.0;
      for (std::size_t j = start; j <= i; ++j) {
        sw += w[j];
        sv += w[j] * v[j];
      }
      const double mean = sv / sw;
      if (mean > prev + 1e-12) {
        feasible = false;
        break;
      }
      prev = mean;
      for (std::size_t j = start; j <= i; ++j) cand[j] = mean;
      start = i + 1;
    }
    if (!feasible) continue;
    const double cost = wdist2(v, cand, w);
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("already monotone input is unchanged") {
  const std::vector<double> v{5, 4, 3, 1, 0.5};
  const std::vector<double> w{1, 2, 1, 1, 3};
  CHECK(monotone_projection(v, w) == v);
}

TEST_CASE("symmetric pooling of a single violation") {
  const auto out = monotone_projection({1.0, 3.0}, {1.0, 1.0});
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(2.0));
}

TEST_CASE("matches the exhaustive block oracle on short random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uv(-2.0, 2.0), uw(0.2, 3.0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rep % 5;  // up to 6
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = uv(rng);
      w[i] = uw(rng);
    }
    const auto fast = monotone_projection(v, w);
    const auto slow = brute_projection(v, w);
    REQUIRE(nonincreasing(fast));
    for (std::size_t i = 0; i < n; ++i)
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-9));
  }
}

TEST_CASE("idempotent and 1-Lipschitz in the weighted norm") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uv(-1.0, 1.0), uw(0.5, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 20;
    std::vector<double> a(n), b(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = uv(rng);
      b[i] = uv(rng);
      w[i] = uw(rng);
    }
    const auto pa = monotone_projection(a, w);
    const auto pb = monotone_projection(b, w);
    const auto paa = monotone_projection(pa, w);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(paa[i] == doctest::Approx(pa[i]).epsilon(1e-12));
    CHECK(wdist2(pa, pb, w) <= wdist2(a, b, w) * (1.0 + 1e-12));
  }
}

TEST_CASE("positive weights are required") {
  CHECK_THROWS(monotone_projection({1.0, 2.0}, {1.0, 0.0}));
  CHECK_THROWS(monotone_projection({1.0, 2.0}, {1.0}));
}
