#include "fhslab/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhslab {

LayerDecomposition layer_cake_decompose(const RadialProfile& u, int K) {
  if (!u.nonincreasing(1e-15 * std::max(1.0, u.values.front())))
    throw std::invalid_argument("layer decomposition requires a non-increasing profile");

  const int K_grid = static_cast<int>(std::floor(std::log2(u.grid.r_max)));
  if (K < 0) {
    const double floor_val = 1e-10 * u.values.front();
    K = K_grid;
    for (int i = 0; i <= K_grid; ++i) {
      if (u.eval(std::pow(2.0, i)) < floor_val) {
        K = i;
        break;
      }
    }
  }
  K = std::min(K, K_grid);
  if (K < 1) throw std::invalid_argument("truncation index must be >= 1");

  LayerDecomposition out;
  out.truncation_index = K;
  out.layers.reserve(static_cast<std::size_t>(K) + 1);
  out.base_heights.reserve(static_cast<std::size_t>(K) + 1);

  const std::size_t n = u.size();
  {
    const double cut = u.eval(1.0);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = std::max(u.values[j] - cut, 0.0);
    out.layers.emplace_back(u.grid, std::move(v), u.tail_exponent, u.mode);
    out.base_heights.push_back(u.values.front());
  }
  for (int i = 1; i <= K; ++i) {
    const double hi = u.eval(std::pow(2.0, i - 1));
    const double lo = u.eval(std::pow(2.0, i));
    const double cap = hi - lo;
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = std::clamp(u.values[j] - lo, 0.0, cap);
    out.layers.emplace_back(u.grid, std::move(v), u.tail_exponent, u.mode);
    out.base_heights.push_back(hi);
  }
  return out;
}

}  // namespace fhslab
