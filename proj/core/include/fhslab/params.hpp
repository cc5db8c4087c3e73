#pragma once

#include <stdexcept>

namespace fhslab {

// Problem parameters (N, p, s, alpha) together with the exponents derived
// from the scale balance (N - alpha)/q = (N - p s)/p.
//
//   q               target exponent of the weighted norm
//   pstar           critical exponent N p / (N - p s)   (q = pstar when alpha = 0)
//   decay_exp       (N - p s)/(p - 1), the radial decay rate of optimizers
//   gamma_threshold N (p - 1)/(N - s), the lower summability threshold
struct ProblemParams {
  int N = 1;
  double p = 2.0;
  double s = 0.5;
  double alpha = 0.0;

  double q = 0.0;
  double pstar = 0.0;
  double decay_exp = 0.0;
  double gamma_threshold = 0.0;

  // alpha == p*s: the weighted norm degenerates to the borderline Hardy case
  // (q == p). Functionals are still evaluable but no minimizer exists.
  bool evaluation_only = false;

  bool minimization_mode() const { return !evaluation_only; }
};

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Validates (N, p, s, alpha) and fills in the derived exponents.
// Throws ParamError when N <= p*s, alpha < 0, alpha > p*s, N outside {1..4},
// p <= 1 or s outside ]0,1[.
ProblemParams make_params(int N, double p, double s, double alpha = 0.0);

}  // namespace fhslab
