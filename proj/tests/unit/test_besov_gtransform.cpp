#include <doctest.h>

#include <cmath>
#include <random>

#include "fhslab/besov.hpp"
#include "fhslab/functionals.hpp"
#include "fhslab/gtransform.hpp"
#include "fhslab/isotonic.hpp"

using namespace fhslab;

namespace {
const Grid kGrid(1e-3, 1e3, 256);

RadialProfile random_monotone(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> v(g.node_count()), w(g.node_count(), 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g.node(i);
    v[i] = (0.3 + uni(rng)) * std::pow(1.0 + r * r, -0.8);
  }
  v = monotone_projection(v, w);
  return RadialProfile(g, std::move(v), 1.6);
}
}  // namespace

TEST_CASE("second differences vanish for constants and obey the crude bound") {
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  std::vector<double> z(kGrid.node_count(), 0.0);
  const RadialProfile zero(kGrid, std::move(z), 1.0);
  CHECK(second_difference_Lp(zero, 1, 2.0, 0.5) == 0.0);

  const auto U = candidate_extremal(make_params(3, 2.0, 0.5, 0.0), kGrid);
  const double up = weighted_norm(U, 3, 0.0, 2.0);
  for (double h : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double d2 = second_difference_Lp(U, 3, 2.0, h);
    CHECK(d2 <= 4.0 * up * (1.0 + 1e-9));
  }
  (void)pp;
}

TEST_CASE("Besov ratio curve stays bounded just above the base order") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  const auto U = candidate_extremal(pp, kGrid);
  std::vector<double> h_set;
  for (int k = 0; k < 10; ++k) h_set.push_back(std::pow(10.0, -3.0 + 3.0 * k / 9.0));
  const double sigma = pp.s + 0.1;
  const auto curve = besov_ratio_curve(U, 3, sigma, pp.p, h_set);
  double hi = 0.0;
  for (double c : curve) {
    REQUIRE(std::isfinite(c));
    hi = std::max(hi, c);
  }
  // membership evidence: no blow-up of the ratio towards small h
  CHECK(hi / curve.back() < 10.0);
  CHECK(besov_seminorm(U, 3, sigma, pp.p, h_set) == doctest::Approx(hi));
  CHECK_THROWS(besov_seminorm(U, 3, sigma, pp.p, {}));

  // negative control: a jump-like ramp lies only in orders below 1/2, so
  // probing well above must blow up towards small h
  std::vector<double> ramp(kGrid.node_count(), 0.0);
  for (std::size_t k = 0; k < ramp.size(); ++k)
    if (kGrid.node(k) < 1.0) ramp[k] = 1.0;
  const RadialProfile jumpish(kGrid, std::move(ramp), 2.0);
  const auto curve_bad = besov_ratio_curve(jumpish, 3, 1.7, pp.p, h_set);
  double bhi = 0.0;
  for (double c : curve_bad) bhi = std::max(bhi, c);
  CHECK(bhi / curve_bad.back() > 10.0);
}

TEST_CASE("identity transform pairs exactly by homogeneity") {
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  const auto u = random_monotone(kGrid, 5);
  const auto [lhs, rhs] = g_transform_pairing(u, pp, GTransform::identity());
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("power truncation G matches the closed form") {
  const double p = 2.0;
  for (double beta : {1.0, 2.0, 4.0}) {
    const auto gt = GTransform::power_truncation(beta, 0.5);
    for (double t : {0.1, 0.4, 0.7, 2.0}) {
      const double tk = std::min(t, 0.5);
      const double expect = std::pow(beta, 1.0 / p) * p / (beta + p - 1.0) *
                            std::pow(tk, (beta + p - 1.0) / p);
      CHECK(gt.G(t, p) == doctest::Approx(expect).epsilon(1e-14));
    }
    // beta = 1 collapses G to the truncation itself
    if (beta == 1.0)
      CHECK(gt.G(0.3, p) == doctest::Approx(gt.g(0.3)).epsilon(1e-14));
  }
}

TEST_CASE("transform inequality across the catalogue and random profiles") {
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto u = random_monotone(kGrid, seed);
    const double top = u.values.front();
    std::vector<GTransform> cat = {
        GTransform::identity(),
        GTransform::power_truncation(1.0, 0.6 * top),
        GTransform::power_truncation(2.0, 0.6 * top),
        GTransform::power_truncation(4.0, 0.6 * top),
        GTransform::layer_clamp(0.3 * top, 0.2 * top)};
    for (const auto& gt : cat) {
      const auto [lhs, rhs] = g_transform_pairing(u, pp, gt);
      CHECK(lhs <= rhs * (1.0 + 1e-3));
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("transforms that clip the analytic tail are rejected") {
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  const auto U = candidate_extremal(pp, Grid(1e-3, 1e3, 128));
  // u(r_max) > 0, so k below it would truncate inside the tail
  CHECK_THROWS(g_transform_pairing(U, pp, GTransform::power_truncation(
                                              2.0, 0.5 * U.values.back())));
  CHECK_THROWS(g_transform_pairing(U, pp, GTransform::layer_clamp(
                                              0.1, 0.5 * U.values.back())));
}
