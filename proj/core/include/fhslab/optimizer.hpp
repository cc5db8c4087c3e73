#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fhslab/functionals.hpp"
#include "fhslab/params.hpp"
#include "fhslab/profile.hpp"

namespace fhslab {

struct TraceRow {
  int iteration = 0;
  double rayleigh = 0.0;
  double step = 0.0;
  double projection_distance = 0.0;
};

struct MinimizerResult {
  RadialProfile profile;
  double I1_estimate = 0.0;
  std::vector<TraceRow> trace;
  bool converged = false;
  int iterations = 0;
  std::string normalization;
};

struct OptimizerOptions {
  int max_iter = 2000;
  double tol = 1e-8;          // relative Rayleigh change over the window
  int window_iters = 50;
  int pin_every = 25;          // dilation pin u(1) = u(0)/2 cadence
  double lambda = 1.0;         // constraint ||u||_{alpha,q}^q = lambda
  std::string init = "extremal-guess";  // | "gaussian-like" | "random"
  std::uint64_t seed = 42;
  EngineOptions engine;
};

// Exact gradient of the discretized [u]_{s,p}^p with respect to node values.
std::vector<double> discrete_gradient(const RadialProfile& u,
                                      const ProblemParams& pp,
                                      const EngineOptions& opt = {});

// Projected gradient descent over radial non-increasing profiles with
// ||u||_{alpha,q} renormalized each step and the dilation pinned every
// pin_every iterations.
MinimizerResult minimize(const ProblemParams& pp, const Grid& grid,
                         const OptimizerOptions& opt = {},
                         const std::optional<RadialProfile>& start = {});

// Scale and dilate so ||u||_{alpha,q} = 1 and u(1) = u(0)/2.
RadialProfile normalize_profile(const RadialProfile& u, const ProblemParams& pp);

}  // namespace fhslab
