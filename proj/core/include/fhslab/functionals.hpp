#pragma once

#include <vector>

#include "fhslab/kernel.hpp"
#include "fhslab/params.hpp"
#include "fhslab/profile.hpp"

namespace fhslab {

struct EngineOptions {
  // cells per side treated by dedicated quadrature around the inner
  // singularity (the two flanking cells are analytic, the rest Gauss)
  int window = 8;
  // outer integration extends this many decades past r_max before the
  // self-similar tail-tail closed form takes over
  double outer_extend_decades = 1.0;
  // the analytic far-field series starts at max(outer end, horizon * center)
  double inner_horizon = 16.0;
  int threads = 1;
};

struct FunctionalReport {
  double seminorm_s_p = 0.0;
  double weighted_norm_alpha_q = 0.0;
  double rayleigh = 0.0;
  double refinement_delta = 0.0;  // max of the per-value deltas
  double seminorm_delta = 0.0;
  double weighted_norm_delta = 0.0;
  double rayleigh_delta = 0.0;
};

// [u]_{s,gamma}^gamma. Divergence of the tail-tail block is detected
// analytically (gamma*(kappa+s) <= N with a nonzero tail) and reported as
// +infinity, never by observing large numbers.
double gagliardo_energy(const RadialProfile& u, int N, double s, double gamma,
                        const EngineOptions& opt = {});

// ([u]_{s,gamma}^gamma)^{1/gamma}; +infinity sentinel as above.
double gagliardo_seminorm(const RadialProfile& u, int N, double s, double gamma,
                          const EngineOptions& opt = {});

// Exact gradient of the discretized gamma-energy with respect to the node
// values, including the analytic tail blocks' dependence on u(r_max).
// Requires gamma > 1 and a finite energy.
std::vector<double> gagliardo_energy_gradient(const RadialProfile& u, int N,
                                              double s, double gamma,
                                              const EngineOptions& opt = {});

// |D^s u|^gamma(r): the energy density at one radius (r <= r_max).
double energy_density(const RadialProfile& u, int N, double s, double gamma,
                      double r, const EngineOptions& opt = {});

// Pointwise fractional p-Laplacian
//   f(r) = 2 p.v. \int |u(r)-u(y)|^{p-2}(u(r)-u(y)) |x-y|^{-(N+ps)} dy
// evaluated at the core nodes. The principal value freezes the one-sided
// slopes in the flanking cells; at a kink the divergent odd-slope residual
// exists only for p-1 > ps and is dropped and flagged otherwise.
std::vector<double> frac_p_laplacian(const RadialProfile& u,
                                     const ProblemParams& pp,
                                     std::vector<unsigned char>* kink_flags = nullptr,
                                     const EngineOptions& opt = {});
double frac_p_laplacian_at(const RadialProfile& u, const ProblemParams& pp,
                           double r, const EngineOptions& opt = {});

// (\int |u|^q |x|^{-alpha} dx)^{1/q}; +infinity when q*kappa <= N-alpha with
// a nonzero tail.
double weighted_norm(const RadialProfile& u, int N, double alpha, double q);

// [u]_{s,p}^p / ||u||_{alpha,q}^p
double rayleigh_quotient(const RadialProfile& u, const ProblemParams& pp,
                         const EngineOptions& opt = {});

FunctionalReport functional_report(const RadialProfile& u,
                                   const ProblemParams& pp,
                                   const EngineOptions& opt = {});

// sup_k k |{|u| > k}|^{1/q} for radial non-increasing profiles
// (informational: the paper-side constant is not validated).
double weak_lq_quasinorm(const RadialProfile& u, int N, double q);

// L^q norm with weight |x|^{-alpha} of signed node samples with a power
// far-field |f| ~ |f(r_max)| (r/r_max)^{-tail_exp}; used for operator norms.
double radial_Lq_norm_samples(const Grid& grid, const std::vector<double>& vals,
                              int N, double alpha, double q, double tail_exp);

}  // namespace fhslab
