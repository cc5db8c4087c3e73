#include "fhslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhslab {

Grid::Grid(double rmin, double rmax, int m) : r_min(rmin), r_max(rmax), M(m) {
  if (!(rmin > 0.0) || !(rmax > rmin))
    throw std::invalid_argument("grid needs 0 < r_min < r_max");
  if (m < 8) throw std::invalid_argument("grid needs M >= 8");
  ratio_ = std::pow(rmax / rmin, 1.0 / m);
  nodes_.resize(static_cast<std::size_t>(m) + 2);
  nodes_[0] = 0.0;
  for (int k = 0; k <= m; ++k)
    nodes_[static_cast<std::size_t>(k) + 1] = rmin * std::pow(rmax / rmin, double(k) / m);
  nodes_.back() = rmax;  // avoid pow() drift at the top end
}

std::size_t Grid::cell_of(double r) const {
  if (r <= nodes_[1]) return 0;
  if (r >= nodes_[nodes_.size() - 2]) return nodes_.size() - 2;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

}  // namespace fhslab
