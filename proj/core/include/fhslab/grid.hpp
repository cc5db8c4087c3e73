#pragma once

#include <cstddef>
#include <vector>

namespace fhslab {

// Radial grid: node 0 at r = 0 followed by M+1 geometric nodes from r_min to
// r_max. Log spacing resolves core and tail behaviour that spans decades.
struct Grid {
  double r_min = 1e-3;
  double r_max = 1e4;
  int M = 512;

  Grid() = default;
  Grid(double rmin, double rmax, int m);

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(std::size_t k) const { return nodes_[k]; }
  double ratio() const { return ratio_; }

  // Index of the cell [node(k), node(k+1)] containing r (clamped to the last
  // cell for r >= r_max).
  std::size_t cell_of(double r) const;

  bool operator==(const Grid& o) const {
    return r_min == o.r_min && r_max == o.r_max && M == o.M;
  }

  // Same span, doubled resolution.
  Grid refined() const { return Grid(r_min, r_max, 2 * M); }

 private:
  std::vector<double> nodes_;
  double ratio_ = 0.0;
};

}  // namespace fhslab
