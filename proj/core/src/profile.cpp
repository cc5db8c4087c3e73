#include "fhslab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhslab {

RadialProfile::RadialProfile(Grid g, std::vector<double> vals, double kappa,
                             InterpMode m)
    : grid(std::move(g)), values(std::move(vals)), tail_exponent(kappa), mode(m) {
  if (values.size() != grid.node_count())
    throw std::invalid_argument("profile values must match grid node count");
  if (!(tail_exponent > 0.0))
    throw std::invalid_argument("tail exponent must be positive");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("profile values must be finite and nonnegative");
}

double RadialProfile::tail_coefficient() const {
  return values.back() * std::pow(grid.r_max, tail_exponent);
}

double RadialProfile::eval(double r) const {
  if (r <= 0.0) return values.front();
  if (r >= grid.r_max) {
    if (r == grid.r_max) return values.back();
    return values.back() * std::pow(r / grid.r_max, -tail_exponent);
  }
  const std::size_t k = grid.cell_of(r);
  if (mode == InterpMode::Constant) return values[k];
  const double a = grid.node(k), b = grid.node(k + 1);
  const double w = (r - a) / (b - a);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

double RadialProfile::cell_slope(std::size_t k) const {
  const double a = grid.node(k), b = grid.node(k + 1);
  return (values[k + 1] - values[k]) / (b - a);
}

bool RadialProfile::nonincreasing(double tol) const {
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i + 1] > values[i] + tol) return false;
  return true;
}

double RadialProfile::support_radius() const {
  for (std::size_t i = values.size(); i-- > 0;)
    if (values[i] > 0.0) return grid.node(i);
  return 0.0;
}

double RadialProfile::half_height_radius() const {
  const double target = values.front() / 2.0;
  if (!(values.front() > 0.0))
    throw std::invalid_argument("half-height undefined for zero profile");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i] >= target && values[i + 1] <= target) {
      const double a = grid.node(i), b = grid.node(i + 1);
      if (values[i] == values[i + 1]) return b;
      const double w = (values[i] - target) / (values[i] - values[i + 1]);
      return a + w * (b - a);
    }
  }
  // allow the crossing to sit in the analytic tail
  if (values.back() > target && tail_exponent > 0.0)
    return grid.r_max * std::pow(values.back() / target, 1.0 / tail_exponent);
  throw std::invalid_argument("profile has no half-height crossing");
}

RadialProfile RadialProfile::with_values(std::vector<double> vals) const {
  return RadialProfile(grid, std::move(vals), tail_exponent, mode);
}

RadialProfile RadialProfile::transform(const std::function<double(double)>& phi,
                                       double new_tail_exponent) const {
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = phi(values[i]);
  return RadialProfile(grid, std::move(v), new_tail_exponent, mode);
}

RadialProfile RadialProfile::resampled(const Grid& g) const {
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eval(g.node(i));
  return RadialProfile(g, std::move(v), tail_exponent, mode);
}

RadialProfile RadialProfile::truncated_above(double R) const {
  const double cut = eval(R);
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    v[i] = grid.node(i) >= R ? 0.0 : std::max(values[i] - cut, 0.0);
  return RadialProfile(grid, std::move(v), tail_exponent, mode);
}

RadialProfile candidate_extremal(const ProblemParams& params, const Grid& grid) {
  if (params.evaluation_only)
    throw ParamError("candidate extremal needs alpha < p*s");
  const double inner = (params.p - params.alpha / params.s) / (params.p - 1.0);
  const double outer =
      (params.N - params.s * params.p) / (params.p - params.alpha / params.s);
  std::vector<double> v(grid.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = grid.node(i);
    v[i] = std::pow(1.0 + std::pow(r, inner), -outer);
  }
  return RadialProfile(grid, std::move(v), params.decay_exp);
}

RadialProfile dilate_scale(const RadialProfile& u, double lambda, double mu,
                           std::string* warning) {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("dilate_scale needs lambda, mu > 0");
  Grid g = u.grid;
  const double support = u.support_radius();
  if (support > 0.0 && support / mu < g.r_min) {
    if (warning) *warning += "support fell below r_min; grid refined; ";
    g = Grid(support / (mu * 64.0), g.r_max, g.M);
  }
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = lambda * u.eval(mu * g.node(i));
  return RadialProfile(g, std::move(v), u.tail_exponent, u.mode);
}

}  // namespace fhslab
