#include "fhslab/gtransform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhslab {

GTransform GTransform::power_truncation(double beta, double k) {
  if (!(beta >= 1.0)) throw std::invalid_argument("power truncation needs beta >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("power truncation needs k > 0");
  GTransform g;
  g.kind = Kind::PowerTruncation;
  g.beta = beta;
  g.k = k;
  return g;
}

GTransform GTransform::layer_clamp(double a, double b) {
  if (!(a > 0.0) || b < 0.0) throw std::invalid_argument("bad layer clamp");
  GTransform g;
  g.kind = Kind::LayerClamp;
  g.a = a;
  g.b = b;
  return g;
}

double GTransform::g(double t) const {
  switch (kind) {
    case Kind::Identity: return t;
    case Kind::PowerTruncation: return std::pow(std::min(t, k), beta);
    case Kind::LayerClamp: return std::min(a, std::max(t - b, 0.0));
  }
  return t;
}

double GTransform::G(double t, double p) const {
  switch (kind) {
    case Kind::Identity:
      return t;
    case Kind::PowerTruncation:
      return std::pow(beta, 1.0 / p) * p / (beta + p - 1.0) *
             std::pow(std::min(t, k), (beta + p - 1.0) / p);
    case Kind::LayerClamp:
      return std::min(a, std::max(t - b, 0.0));
  }
  return t;
}

double discrete_pairing(const RadialProfile& u, const ProblemParams& pp,
                        const std::vector<double>& v_nodes,
                        const EngineOptions& opt) {
  if (v_nodes.size() != u.size())
    throw std::invalid_argument("pairing: node count mismatch");
  const auto grad = gagliardo_energy_gradient(u, pp.N, pp.s, pp.p, opt);
  double acc = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) acc += grad[i] * v_nodes[i];
  return acc / pp.p;
}

std::pair<double, double> g_transform_pairing(const RadialProfile& u,
                                              const ProblemParams& pp,
                                              const GTransform& gt,
                                              const EngineOptions& opt) {
  const double p = pp.p;
  const double uM = u.values.back();

  // image tail exponent: the power tail must map to a representable power
  // tail (or vanish under the clamp)
  double kap2 = u.tail_exponent;
  if (gt.kind == GTransform::Kind::PowerTruncation) {
    if (uM > gt.k)
      throw std::invalid_argument(
          "power truncation must not clip the analytic tail (need u(r_max) <= k)");
    kap2 = u.tail_exponent * (gt.beta + p - 1.0) / p;
  } else if (gt.kind == GTransform::Kind::LayerClamp) {
    if (uM > gt.b)
      throw std::invalid_argument(
          "layer clamp must vanish on the analytic tail (need u(r_max) <= b)");
  }

  const RadialProfile Gu =
      u.transform([&](double t) { return gt.G(t, p); }, kap2);
  const double lhs = gagliardo_energy(Gu, pp.N, pp.s, pp.p, opt);

  std::vector<double> gu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) gu[i] = gt.g(u.values[i]);
  const double rhs = discrete_pairing(u, pp, gu, opt);
  return {lhs, rhs};
}

}  // namespace fhslab
