#pragma once

#include <map>
#include <string>
#include <vector>

#include "fhslab/functionals.hpp"
#include "fhslab/params.hpp"
#include "fhslab/profile.hpp"

namespace fhslab {

// One theorem-level claim turned into a numerical check with explicit
// margins. Pass requires |measured - target| <= tolerance AND
// refinement_delta < tolerance/2.
struct VerificationReport {
  struct Row {
    double parameter = 0.0;
    double measured = 0.0;
    double target = 0.0;
    double margin = 0.0;
  };

  std::string name;
  std::string inputs_digest;
  std::map<std::string, double> measured;
  std::map<std::string, double> targets;
  double tolerance = 0.0;
  double margin = 0.0;  // worst slack across rows (positive = headroom)
  std::string verdict;  // "pass" | "fail" | "informational"
  double refinement_delta = 0.0;
  std::string notes;
  std::vector<Row> rows;

  bool failed() const { return verdict == "fail"; }
};

// least-squares slope of log u against log r over [r_lo, r_hi], negated so a
// pure power r^{-kappa} yields kappa
double fit_decay_exponent(const RadialProfile& u, double r_lo, double r_hi);

VerificationReport check_decay(const RadialProfile& u, const ProblemParams& pp,
                               double r_lo, double r_hi, double rel_tol,
                               const EngineOptions& eng = {});

// truncated-growth sweep across gamma: below the threshold the truncation
// seminorms grow like R^{N - gamma (N-s)/(p-1)}; above they saturate
VerificationReport gamma_sweep(const RadialProfile& u, const ProblemParams& pp,
                               const std::vector<double>& gammas,
                               const std::vector<double>& radii,
                               const EngineOptions& eng = {});

// per-layer seminorm slopes of the dyadic decomposition
VerificationReport dyadic_layer_check(const RadialProfile& u,
                                      const ProblemParams& pp, double gamma,
                                      double slope_tol = 0.1,
                                      const EngineOptions& eng = {});

// scale-invariance of the compact-support interpolation quotient
VerificationReport interpolation_scaling_check(const RadialProfile& u,
                                               const ProblemParams& pp,
                                               double tau, double mu,
                                               double gamma,
                                               const EngineOptions& eng = {});

// uniform and far-field bounds on |D^s eta|^gamma for a polynomial bump
// eta(r) = (1-(r/R)^2)^2 on B_R; the constant is calibrated on R=1 and
// transferred to the dilated bump
VerificationReport cutoff_bound_check(int N, double gamma, double s, double R,
                                      const Grid& grid, bool constant_bump = false,
                                      const EngineOptions& eng = {});

// borderline Hardy chain for non-increasing profiles
VerificationReport hardy_chain_check(const RadialProfile& u,
                                     const ProblemParams& pp);

// ratio ||u||_t / ||f||_r^{1/(p-1)} is invariant under u -> lambda u(mu x)
VerificationReport summability_scale_check(const RadialProfile& u,
                                           const ProblemParams& pp, double r,
                                           const EngineOptions& eng = {});

// boundedness of sup_h ||delta_h^2 u||_p / h^sigma with sigma from the
// regularity bootstrap at r = (p*)', t = infinity
VerificationReport besov_regularity_check(const RadialProfile& u,
                                          const ProblemParams& pp,
                                          const EngineOptions& eng = {});

// profile sanity: monotone non-increasing values (negative control)
VerificationReport monotonicity_check(const RadialProfile& u);

// sigma and theta of the regularity bootstrap (exposed for tests)
double besov_theta(const ProblemParams& pp);
double besov_sigma(const ProblemParams& pp);

std::string profile_digest(const RadialProfile& u);

}  // namespace fhslab
