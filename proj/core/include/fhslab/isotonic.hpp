#pragma once

#include <vector>

namespace fhslab {

// Weighted least-squares projection onto non-increasing sequences
// (pool-adjacent-violators; ties resolved by pooling). Weights must be
// positive; for radial profiles they are the cell measures ~ r^{N-1} dr.
std::vector<double> monotone_projection(const std::vector<double>& values,
                                        const std::vector<double>& weights);

}  // namespace fhslab
