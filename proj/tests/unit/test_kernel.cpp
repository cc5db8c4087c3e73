#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <random>

#include "fhslab/kernel.hpp"
#include "fhslab/kernel_table.hpp"

using namespace fhslab;

TEST_CASE("two-point sphere closed form in one dimension") {
  const double beta = 0.7, r = 2.0, rho = 5.0;
  const double expect = std::pow(3.0, -1.7) + std::pow(7.0, -1.7);
  CHECK(angular_kernel(1, beta, r, rho) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("kernel symmetry in the pair") {
  for (int N : {1, 2, 3, 4}) {
    const double a = angular_kernel(N, 0.9, 2.0, 5.0);
    const double b = angular_kernel(N, 0.9, 5.0, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    CHECK(a > 0.0);
  }
}

TEST_CASE("closed forms match the adaptive angular quadrature") {
  // N=3 closed form comes from the cos substitution; N=1 from the two-point
  // sphere. The quadrature path (production for N=2,4) must reproduce both.
  for (int N : {1, 3}) {
    for (double beta : {0.25, 0.8, 1.5}) {
      for (double sep : {0.5, 1e-2, 1e-3}) {
        const double r = 1.0, rho = 1.0 + sep;
        const double cf = angular_kernel_closed_form(N, beta, r, rho);
        const double qd = angular_kernel_quadrature(N, beta, r, rho);
        CHECK(std::abs(qd / cf - 1.0) < 1e-10);
      }
      for (double sep : {1e-4, 1e-5, 1e-6}) {
        const double r = 1.0, rho = 1.0 + sep;
        const double cf = angular_kernel_closed_form(N, beta, r, rho);
        const double qd = angular_kernel_quadrature(N, beta, r, rho);
        CHECK(std::abs(qd / cf - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("kernel homogeneity") {
  for (int N : {1, 2, 3, 4}) {
    const double beta = 0.6;
    const double base = angular_kernel(N, beta, 1.2, 3.4);
    for (double t : {0.1, 10.0}) {
      const double scaled = angular_kernel(N, beta, 1.2 * t, 3.4 * t);
      CHECK(scaled == doctest::Approx(std::pow(t, -(N + beta)) * base)
                          .epsilon(1e-9));
    }
  }
}

TEST_CASE("diagonal coefficient reduces to the known closed forms") {
  // N=3: the cos substitution gives A = 2 pi / (1 + beta)
  for (double beta : {0.3, 1.1, 1.8})
    CHECK(diag_singular_coefficient(3, beta) ==
          doctest::Approx(2.0 * M_PI / (1.0 + beta)).epsilon(1e-12));
  CHECK(diag_singular_coefficient(1, 0.7) == 1.0);
  // N=2,4: the near-diagonal model must match the quadrature kernel
  for (int N : {2, 4}) {
    const double beta = 0.9;
    const double A = diag_singular_coefficient(N, beta);
    const double r = 1.0, rho = 1.0 + 1e-7;
    const double model = A * std::pow(r * rho, -(N - 1) / 2.0) *
                         std::pow(rho - r, -(1.0 + beta));
    const double exact = angular_kernel_quadrature(N, beta, r, rho);
    CHECK(exact == doctest::Approx(model).epsilon(1e-5));
  }
}

TEST_CASE("near-diagonal frozen-slope rules") {
  SUBCASE("zero slope contributes nothing") {
    const auto rule = near_diagonal_weights(1.0, 1.1, 0.6, 2.0);
    CHECK(rule.contribution(0.0) == 0.0);
  }
  SUBCASE("unit slope on a symmetric cell matches the analytic power integral") {
    const double beta = 0.6, gamma = 2.0, a = 1.0, b = 1.25;
    const auto rule = near_diagonal_weights(a, b, beta, gamma);
    const double e = gamma - 1.0 - beta;
    const double expect =
        2.0 * std::pow(b - a, e + 2.0) / ((e + 1.0) * (e + 2.0));
    CHECK(rule.contribution(1.0) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(rule.contribution(-2.0) ==
          doctest::Approx(std::pow(2.0, gamma) * expect).epsilon(1e-13));
  }
  SUBCASE("halving the cell and summing reproduces the parent") {
    const double beta = 0.45, gamma = 1.6, a = 2.0, b = 2.5, m = -0.8;
    const double mid = 0.5 * (a + b);
    const double parent = near_diagonal_weights(a, b, beta, gamma).contribution(m);
    const double halves =
        near_diagonal_weights(a, mid, beta, gamma).contribution(m) +
        near_diagonal_weights(mid, b, beta, gamma).contribution(m) +
        2.0 * adjacent_cells_contribution(mid - a, b - mid, beta, gamma, m, m);
    CHECK(halves == doctest::Approx(parent).epsilon(1e-8));
  }
}

TEST_CASE("ratio profile and its spline representation") {
  SUBCASE("closed-form dimensions evaluate directly") {
    const KernelContext ctx(3, 0.8);
    CHECK(ctx.kappa_ratio(2.0) ==
          doctest::Approx(angular_kernel_closed_form(3, 0.8, 1.0, 2.0)));
  }
  SUBCASE("spline-backed dimensions track the quadrature") {
    const KernelContext ctx(2, 0.7);
    for (double w : {1.001, 1.03, 1.7, 5.0, 40.0, 900.0}) {
      const double exact = angular_kernel_quadrature(2, 0.7, 1.0, w);
      CHECK(std::abs(ctx.kappa_ratio(w) / exact - 1.0) < 1e-5);
    }
  }
  SUBCASE("remainder after the diagonal model is exact for N=1") {
    const KernelContext ctx(1, 0.5);
    CHECK(ctx.ratio_remainder(1.5) ==
          doctest::Approx(std::pow(2.5, -1.5)).epsilon(1e-14));
  }
  SUBCASE("far asymptote") {
    const KernelContext ctx(4, 1.2);
    const double w = 5e3;
    const double expect = ctx.sphere() * std::pow(w, -(4.0 + 1.2)) *
                          (1.0 + ctx.far_c2() / (w * w));
    CHECK(ctx.kappa_ratio(w) == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("power tail integral against direct quadrature") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.1, 2.0), uk(0.3, 2.5),
      ue(0.2, 1.5), ug(0.6, 2.4);
  // oracle: log-rho adaptive quadrature split at the sign change, then a
  // plain binomial remainder far beyond it where a dominates
  const auto oracle_of = [](double a, double c, double kap, double g, double e,
                            double X, bool with_sign) {
    const double rho_star = std::pow(c / a, 1.0 / kap);
    const double Xf = std::max(X, rho_star) * 1e6;
    const auto f = [&](double t) {
      const double rho = std::exp(t);
      const double v = a - c * std::pow(rho, -kap);
      double val = std::pow(std::abs(v), g) * std::pow(rho, -e);
      if (with_sign && v < 0.0) val = -val;
      return val;
    };
    double acc = 0.0;
    const double t0 = std::log(X), tf = std::log(Xf);
    const double ts = std::log(rho_star);
    if (ts > t0 && ts < tf) {
      acc += GK::integrate(f, t0, ts, 14, 1e-13);
      acc += GK::integrate(f, ts, tf, 14, 1e-13);
    } else {
      acc += GK::integrate(f, t0, tf, 14, 1e-13);
    }
    // remainder: (a - v)^g ~ a^g sum_n C(g,n) (-v/a)^n, v(Xf)/a ~ 1e-6 kap
    double term = 1.0, rem = 0.0;
    for (int n = 0; n < 30; ++n) {
      rem += term * std::pow(a, g) * std::pow(c / a, n) *
             std::pow(Xf, -(e + n * kap)) / (e + n * kap);
      term *= -(g - n) / (n + 1.0);
    }
    return acc + rem;
  };
  for (int rep = 0; rep < 40; ++rep) {
    const double a = ua(rng), c = ua(rng), kap = uk(rng), e = ue(rng),
                 g = ug(rng), X = 0.5 + ua(rng);
    const double mine = power_tail_integral(a, c, kap, g, e, X);
    const double oracle = oracle_of(a, c, kap, g, e, X, false);
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-9));

    const double mine_s = power_tail_integral_signed(a, c, kap, g, e, X);
    const double oracle_s = oracle_of(a, c, kap, g, e, X, true);
    CHECK(mine_s == doctest::Approx(oracle_s).epsilon(1e-8));
  }
}

TEST_CASE("kernel table materialization and binary io") {
  const Grid grid(1e-2, 1e2, 64);
  const KernelTable table(3, 1.0, grid);

  SUBCASE("entries equal pointwise kernel calls") {
    const auto& r = table.radii();
    CHECK(table.entry(3, 10) ==
          doctest::Approx(angular_kernel(3, 1.0, r[3], r[10])).epsilon(1e-13));
    CHECK(table.entry(10, 3) == table.entry(3, 10));
    CHECK(table.entry(5, 5) == 0.0);
  }
  SUBCASE("tables for different exponents are independent") {
    const KernelTable t2(3, 1.4, grid);
    CHECK(t2.entry(3, 10) != table.entry(3, 10));
  }
  SUBCASE("write-read round trip is payload identical") {
    const std::string path = "ktab_test.bin";
    table.save(path);
    const KernelTable back = KernelTable::load(path, grid, 3);
    CHECK(back.same_payload(table));
    CHECK_THROWS(KernelTable::load(path, grid, 2));  // wrong N rejected
    std::remove(path.c_str());
  }
  SUBCASE("memory budget produces an actionable error") {
    CHECK_THROWS_WITH_AS(KernelTable(3, 1.0, Grid(1e-3, 1e3, 4096), 1 << 20),
                         doctest::Contains("reduce M"), std::runtime_error);
  }
}
