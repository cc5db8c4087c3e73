#include <doctest.h>

#include <cmath>

#include "fhslab/profile.hpp"

using namespace fhslab;

namespace {
const Grid kGrid(1e-3, 1e3, 128);
}

TEST_CASE("candidate extremal closed-form samples") {
  SUBCASE("alpha = 0 reduces to (1+r^2)^{-1} at the reference point") {
    const auto pp = make_params(3, 2.0, 0.5, 0.0);
    const auto U = candidate_extremal(pp, kGrid);
    CHECK(U.values.front() == doctest::Approx(1.0));
    CHECK(U.eval(1.0) == doctest::Approx(0.5).epsilon(1e-9));
    // node samples follow the closed form exactly
    for (std::size_t i = 1; i < U.size(); i += 17) {
      const double r = kGrid.node(i);
      CHECK(U.values[i] ==
            doctest::Approx(1.0 / (1.0 + r * r)).epsilon(1e-13));
    }
    // between nodes the linear interpolant tracks it to O(h^2)
    CHECK(U.eval(2.0) == doctest::Approx(0.2).epsilon(5e-3));
    CHECK(U.tail_exponent == doctest::Approx(2.0));
  }
  SUBCASE("alpha = 0.5 gives (1+r)^{-2}") {
    const auto pp = make_params(3, 2.0, 0.5, 0.5);
    const auto U = candidate_extremal(pp, kGrid);
    CHECK(U.eval(1.0) == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("strictly decreasing with U(0) = 1 exactly") {
    const auto pp = make_params(1, 2.0, 0.4, 0.0);
    const auto U = candidate_extremal(pp, kGrid);
    CHECK(U.values.front() == 1.0);
    for (std::size_t i = 1; i < U.size(); ++i)
      CHECK(U.values[i] < U.values[i - 1]);
  }
}

TEST_CASE("evaluation is continuous across the tail junction") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  const auto U = candidate_extremal(pp, kGrid);
  const double below = U.eval(kGrid.r_max * (1.0 - 1e-12));
  const double above = U.eval(kGrid.r_max * (1.0 + 1e-12));
  CHECK(below == doctest::Approx(above).epsilon(1e-9));
}

TEST_CASE("dilation identities") {
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  const auto U = candidate_extremal(pp, kGrid);

  SUBCASE("identity dilation returns the same samples") {
    const auto V = dilate_scale(U, 1.0, 1.0);
    for (std::size_t i = 0; i < U.size(); ++i)
      CHECK(V.values[i] == doctest::Approx(U.values[i]));
  }
  SUBCASE("composition matches a single combined dilation") {
    const auto V1 = dilate_scale(dilate_scale(U, 2.0, 0.5), 3.0, 4.0);
    const auto V2 = dilate_scale(U, 6.0, 2.0);
    for (std::size_t i = 0; i < U.size(); i += 7) {
      const double r = kGrid.node(i);
      if (r > kGrid.r_max / 4.0) break;  // composed tail resample tolerance
      CHECK(V1.values[i] == doctest::Approx(V2.values[i]).epsilon(2e-3));
    }
  }
  SUBCASE("support collapse triggers the refinement warning") {
    std::vector<double> v(kGrid.node_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (kGrid.node(i) < 0.01) v[i] = 1.0 - kGrid.node(i) / 0.01;
    const RadialProfile tiny(kGrid, std::move(v), 2.0);
    std::string warn;
    const auto W = dilate_scale(tiny, 1.0, 1e4, &warn);
    CHECK(!warn.empty());
    CHECK(W.support_radius() > 0.0);
  }
}

TEST_CASE("half-height radius inverts monotone profiles") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  const auto U = candidate_extremal(pp, kGrid);
  const double rh = U.half_height_radius();
  CHECK(U.eval(rh) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("truncation clamps at the cut height and kills the tail") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  const auto U = candidate_extremal(pp, kGrid);
  const auto T = U.truncated_above(10.0);
  CHECK(!T.has_tail());
  const double cut = U.eval(10.0);
  CHECK(T.values.front() == doctest::Approx(1.0 - cut));
  for (std::size_t i = 0; i < T.size(); ++i)
    if (kGrid.node(i) >= 10.0) CHECK(T.values[i] == 0.0);
}

TEST_CASE("profile validation") {
  std::vector<double> bad(kGrid.node_count(), 1.0);
  bad[3] = -0.5;
  CHECK_THROWS(RadialProfile(kGrid, bad, 2.0));
  std::vector<double> ok(kGrid.node_count(), 1.0);
  CHECK_THROWS(RadialProfile(kGrid, ok, -1.0));
}
