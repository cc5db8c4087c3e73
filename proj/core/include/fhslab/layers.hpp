#pragma once

#include <vector>

#include "fhslab/profile.hpp"

namespace fhslab {

// Horizontal dyadic decomposition of a non-increasing profile: slices cut at
// the heights u(2^i),
//   u_0 = (u - u(1))_+ ,
//   u_i = min{ u(2^{i-1}) - u(2^i), (u - u(2^i))_+ } ,  i >= 1,
// so layer i is supported in B_{2^i} and the partial sums telescope to
// u - u(2^K).
struct LayerDecomposition {
  std::vector<RadialProfile> layers;
  std::vector<double> base_heights;  // u(2^{i-1}) per layer (u(0) slot for i=0)
  int truncation_index = 0;
};

// K < 0 picks the default truncation: the smallest i with
// u(2^i) < 1e-10 * u(0), capped so 2^K stays on the grid.
LayerDecomposition layer_cake_decompose(const RadialProfile& u, int K = -1);

}  // namespace fhslab
