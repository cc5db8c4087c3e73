#include "fhslab/besov.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

#include "fhslab/kernel.hpp"

namespace fhslab {

namespace {

// second difference of the radial function along the axis direction at
// radius r, polar angle theta (cos t = ct)
inline double delta2(const RadialProfile& u, double r, double h, double ct) {
  const double rp = std::sqrt(r * r + h * h + 2.0 * r * h * ct);
  const double rm = std::sqrt(r * r + h * h - 2.0 * r * h * ct);
  return u.eval(rp) - 2.0 * u.eval(r) + u.eval(rm);
}

}  // namespace

double second_difference_Lp(const RadialProfile& u, int N, double p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("second difference needs h > 0");
  if (!(p >= 1.0)) throw std::invalid_argument("second difference needs p >= 1");

  // radial panels: the grid cells, extended geometrically well past both the
  // grid top and the displacement scale
  std::vector<double> edges = u.grid.nodes();
  const double zeta = u.grid.ratio();
  const double r_big = std::max(u.grid.r_max * 10.0, 100.0 * h);
  while (edges.back() < r_big) edges.push_back(edges.back() * zeta);

  using G8 = boost::math::quadrature::gauss<double, 8>;
  using G24 = boost::math::quadrature::gauss<double, 24>;

  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const auto fr = [&](double r) -> double {
      if (N == 1) {
        const double d = u.eval(r + h) - 2.0 * u.eval(r) + u.eval(std::abs(r - h));
        return std::pow(std::abs(d), p);
      }
      const auto fth = [&](double th) {
        const double d = delta2(u, r, h, std::cos(th));
        double w = std::pow(std::abs(d), p);
        if (N >= 3) w *= std::pow(std::sin(th), N - 2.0);
        return w;
      };
      constexpr double kPi = 3.141592653589793238462643383279502884;
      return G24::integrate(fth, 0.0, kPi) * std::pow(r, N - 1.0);
    };
    acc += G8::integrate(fr, a, b);
  }

  // power-tail remainder: |delta2| ~ h^2 c kappa(kappa+1) r^{-kappa-2}
  if (u.has_tail()) {
    const double kap = u.tail_exponent;
    const double coef = h * h * u.tail_coefficient() * kap * (kap + 1.0);
    const double X = edges.back();
    const double ex = p * (kap + 2.0) - N;
    const double angle_mass =
        N == 1 ? 1.0 : sphere_area(N) / sphere_area(N - 1);
    if (ex > 0.0) acc += angle_mass * std::pow(coef, p) * std::pow(X, -ex) / ex;
  }

  const double measure = N == 1 ? 2.0 : sphere_area(N - 1);
  return std::pow(measure * acc, 1.0 / p);
}

std::vector<double> besov_ratio_curve(const RadialProfile& u, int N,
                                      double sigma, double p,
                                      const std::vector<double>& h_set) {
  if (h_set.empty()) throw std::invalid_argument("empty displacement set");
  if (!(sigma > 0.0 && sigma < 2.0))
    throw std::invalid_argument("besov seminorm needs sigma in ]0,2[");
  std::vector<double> out;
  out.reserve(h_set.size());
  for (double h : h_set)
    out.push_back(second_difference_Lp(u, N, p, h) / std::pow(h, sigma));
  return out;
}

double besov_seminorm(const RadialProfile& u, int N, double sigma, double p,
                      const std::vector<double>& h_set) {
  const auto curve = besov_ratio_curve(u, N, sigma, p, h_set);
  double best = 0.0;
  for (double v : curve) best = std::max(best, v);
  return best;
}

}  // namespace fhslab
