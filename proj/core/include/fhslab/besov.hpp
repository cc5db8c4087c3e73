#pragma once

#include <vector>

#include "fhslab/profile.hpp"

namespace fhslab {

// ||delta_h^2 u||_p with the displacement along a coordinate axis; for
// radial u the integral reduces to (r, angle). h > 0.
double second_difference_Lp(const RadialProfile& u, int N, double p, double h);

// sup over h_set of ||delta_h^2 u||_p / h^sigma (the B^sigma_{p,inf}
// seminorm probed on the given displacements; 0 < sigma < 2).
double besov_seminorm(const RadialProfile& u, int N, double sigma, double p,
                      const std::vector<double>& h_set);

// the per-h curve h -> ||delta_h^2 u||_p / h^sigma
std::vector<double> besov_ratio_curve(const RadialProfile& u, int N,
                                      double sigma, double p,
                                      const std::vector<double>& h_set);

}  // namespace fhslab
