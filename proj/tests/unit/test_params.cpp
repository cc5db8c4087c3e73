#include <doctest.h>

#include <random>

#include "fhslab/params.hpp"

using namespace fhslab;

TEST_CASE("derived exponents at the reference point") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  CHECK(pp.q == doctest::Approx(3.0));
  CHECK(pp.pstar == doctest::Approx(3.0));
  CHECK(pp.decay_exp == doctest::Approx(2.0));
  CHECK(pp.gamma_threshold == doctest::Approx(1.2));
  CHECK(pp.minimization_mode());
}

TEST_CASE("weighted target exponent") {
  CHECK(make_params(3, 2.0, 0.5, 0.5).q == doctest::Approx(2.5));
}

TEST_CASE("alpha = 0 collapses q to the critical exponent") {
  const auto pp = make_params(2, 1.5, 0.6, 0.0);
  CHECK(pp.q == doctest::Approx(pp.pstar));
}

TEST_CASE("invalid parameter combinations are rejected") {
  CHECK_THROWS_AS(make_params(1, 2.0, 0.6, 0.0), ParamError);  // N <= ps
  CHECK_THROWS_AS(make_params(3, 2.0, 0.5, -0.1), ParamError);
  CHECK_THROWS_AS(make_params(3, 2.0, 0.5, 1.5), ParamError);  // alpha > ps
  CHECK_THROWS_AS(make_params(3, 1.0, 0.5, 0.0), ParamError);  // p <= 1
  CHECK_THROWS_AS(make_params(3, 2.0, 1.0, 0.0), ParamError);  // s >= 1
  CHECK_THROWS_AS(make_params(5, 2.0, 0.5, 0.0), ParamError);  // N > 4
}

TEST_CASE("alpha = p s is evaluation-only, not an error") {
  const auto pp = make_params(3, 2.0, 0.5, 1.0);
  CHECK(pp.evaluation_only);
  CHECK(pp.q == doctest::Approx(pp.p));
}

TEST_CASE("scale balance holds to machine precision on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(1.05, 3.5), us(0.05, 0.95),
      ua(0.0, 1.0);
  std::uniform_int_distribution<int> uN(1, 4);
  int done = 0;
  while (done < 1000) {
    const int N = uN(rng);
    const double p = up(rng), s = us(rng);
    if (!(N > p * s)) continue;
    const double alpha = ua(rng) * p * s;
    const auto pp = make_params(N, p, s, alpha);
    const double lhs = (N - alpha) / pp.q;
    const double rhs = (N - p * s) / p;
    CHECK(std::abs(lhs - rhs) < 1e-14);
    ++done;
  }
}
