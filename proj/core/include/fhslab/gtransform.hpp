#pragma once

#include <string>
#include <utility>

#include "fhslab/functionals.hpp"
#include "fhslab/params.hpp"
#include "fhslab/profile.hpp"

namespace fhslab {

// Closed catalogue of non-decreasing absolutely continuous maps g with
// companion G(t) = \int_0^t g'(tau)^{1/p} dtau:
//   identity            g(t) = t,                G = g
//   power truncation    g(t) = min(t,k)^beta,    G = beta^{1/p} p/(beta+p-1)
//                                                    min(t,k)^{(beta+p-1)/p}
//   layer clamp         g(t) = min(a, (t-b)_+),  G = g  (g' is 0/1-valued)
struct GTransform {
  enum class Kind { Identity, PowerTruncation, LayerClamp };
  Kind kind = Kind::Identity;
  double beta = 1.0;  // power truncation exponent, beta >= 1
  double k = 1.0;     // truncation height
  double a = 1.0;     // clamp width
  double b = 0.0;     // clamp base height

  static GTransform identity() { return {}; }
  static GTransform power_truncation(double beta, double k);
  static GTransform layer_clamp(double a, double b);

  double g(double t) const;
  double G(double t, double p) const;
};

// Discrete weak pairing <(-Delta_p)^s u, v> = (1/p) grad E_p(u) . v with v
// sampled at the nodes.
double discrete_pairing(const RadialProfile& u, const ProblemParams& pp,
                        const std::vector<double>& v_nodes,
                        const EngineOptions& opt = {});

// lhs = [G(u)]_{s,p}^p, rhs = <(-Delta_p)^s u, g(u)>; the transform
// inequality asserts lhs <= rhs.
std::pair<double, double> g_transform_pairing(const RadialProfile& u,
                                              const ProblemParams& pp,
                                              const GTransform& gt,
                                              const EngineOptions& opt = {});

}  // namespace fhslab
