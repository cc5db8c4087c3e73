#include "fhslab/params.hpp"

#include <cmath>
#include <string>

namespace fhslab {

ProblemParams make_params(int N, double p, double s, double alpha) {
  if (N < 1 || N > 4)
    throw ParamError("N must be one of {1,2,3,4}, got " + std::to_string(N));
  if (!(p > 1.0)) throw ParamError("p must be > 1, got " + std::to_string(p));
  if (!(s > 0.0 && s < 1.0))
    throw ParamError("s must lie in ]0,1[, got " + std::to_string(s));
  const double ps = p * s;
  if (!(static_cast<double>(N) > ps))
    throw ParamError("need N > p*s, got N=" + std::to_string(N) +
                     ", p*s=" + std::to_string(ps));
  if (alpha < 0.0)
    throw ParamError("alpha must be >= 0, got " + std::to_string(alpha));
  if (alpha > ps)
    throw ParamError("alpha must be <= p*s, got alpha=" + std::to_string(alpha) +
                     ", p*s=" + std::to_string(ps));

  ProblemParams pr;
  pr.N = N;
  pr.p = p;
  pr.s = s;
  pr.alpha = alpha;
  pr.q = p * (N - alpha) / (N - ps);
  pr.pstar = N * p / (N - ps);
  pr.decay_exp = (N - ps) / (p - 1.0);
  pr.gamma_threshold = N * (p - 1.0) / (N - s);
  pr.evaluation_only = (alpha == ps);
  return pr;
}

}  // namespace fhslab
