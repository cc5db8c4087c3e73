#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fhslab/grid.hpp"
#include "fhslab/params.hpp"

namespace fhslab {

enum class InterpMode { Linear, Constant };

// Radial function u(|x|): nonnegative values on the grid nodes, plus an
// analytic power tail u(r) = u(r_max) * (r/r_max)^{-tail_exponent} for
// r > r_max. In Constant mode u is the left-node value on each cell
// (exists for closed-form oracle tests only).
struct RadialProfile {
  Grid grid;
  std::vector<double> values;
  double tail_exponent = 1.0;
  InterpMode mode = InterpMode::Linear;

  RadialProfile() = default;
  RadialProfile(Grid g, std::vector<double> vals, double kappa,
                InterpMode m = InterpMode::Linear);

  std::size_t size() const { return values.size(); }
  double u_max_node() const { return values.back(); }
  // Coefficient c of the absolute tail form u(r) = c * r^{-kappa}.
  double tail_coefficient() const;
  bool has_tail() const { return values.back() > 0.0; }

  double eval(double r) const;
  // Slope of the linear interpolant on cell k.
  double cell_slope(std::size_t k) const;
  bool nonincreasing(double tol = 0.0) const;
  // Largest node radius with a positive value (0 if identically zero).
  double support_radius() const;
  // Smallest r with u(r) = u(0)/2 (linear interpolation between nodes);
  // throws if u never crosses half height.
  double half_height_radius() const;

  RadialProfile with_values(std::vector<double> vals) const;
  // Nodewise map t -> phi(t); the tail exponent must be supplied by the
  // caller since phi need not preserve power laws.
  RadialProfile transform(const std::function<double(double)>& phi,
                          double new_tail_exponent) const;
  // Resample onto another grid (tail exponent kept).
  RadialProfile resampled(const Grid& g) const;
  // (u - u(R))_+ : the layer-cake style truncation, supported in B_R.
  RadialProfile truncated_above(double R) const;
};

// Samples U(r) = (1 + r^{(p - alpha/s)/(p-1)})^{-(N - s p)/(p - alpha/s)} on
// the grid; tail exponent is the decay rate (N - p s)/(p - 1).
RadialProfile candidate_extremal(const ProblemParams& params, const Grid& grid);

// v(r) = lambda * u(mu r), resampled on u's grid. If mu squeezes the support
// below the first positive node the result is rebuilt on a refined grid and
// a note is appended to *warning (when non-null).
RadialProfile dilate_scale(const RadialProfile& u, double lambda, double mu,
                           std::string* warning = nullptr);

}  // namespace fhslab
