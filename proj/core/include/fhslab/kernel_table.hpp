#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhslab/grid.hpp"
#include "fhslab/kernel.hpp"

namespace fhslab {

// Dense table of K(r_i, r_j) over all off-diagonal grid node pairs
// (diagonal slots are zero). Immutable after construction: concurrent
// readers, no writers.
class KernelTable {
 public:
  KernelTable() = default;
  // memory_budget_bytes guards the dense allocation; 0 means default (1 GiB).
  KernelTable(int N, double beta, const Grid& grid,
              std::size_t memory_budget_bytes = 0);

  int N() const { return N_; }
  double beta() const { return beta_; }
  std::size_t size() const { return radii_.size(); }
  const std::vector<double>& radii() const { return radii_; }

  double entry(std::size_t i, std::size_t j) const {
    return entries_[i * radii_.size() + j];
  }
  // Coefficient of the near-diagonal model
  // K ~ A (r rho)^{-(N-1)/2} |r-rho|^{-(1+beta)}.
  double diagonal_coefficient() const { return diag_coef_; }

  // Binary dump: 16-byte header (u32 N, u32 node count, f64 beta,
  // little-endian) followed by the row-major f64 entries.
  void save(const std::string& path) const;
  static KernelTable load(const std::string& path, const Grid& grid,
                          int expect_N);

  bool same_payload(const KernelTable& other) const {
    return N_ == other.N_ && beta_ == other.beta_ && entries_ == other.entries_;
  }

 private:
  int N_ = 0;
  double beta_ = 0.0;
  double diag_coef_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> entries_;
};

}  // namespace fhslab
