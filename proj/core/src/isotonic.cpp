#include "fhslab/isotonic.hpp"

#include <stdexcept>

namespace fhslab {

std::vector<double> monotone_projection(const std::vector<double>& values,
                                        const std::vector<double>& weights) {
  const std::size_t n = values.size();
  if (weights.size() != n)
    throw std::invalid_argument("values/weights size mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");

  // Blocks of pooled entries; mean must stay non-increasing left to right.
  struct Block {
    double sum, weight;
    std::size_t count;
    double mean() const { return sum / weight; }
  };
  std::vector<Block> stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Block b{values[i] * weights[i], weights[i], 1};
    while (!stack.empty() && stack.back().mean() < b.mean()) {
      b.sum += stack.back().sum;
      b.weight += stack.back().weight;
      b.count += stack.back().count;
      stack.pop_back();
    }
    stack.push_back(b);
  }

  std::vector<double> out(n);
  std::size_t pos = 0;
  for (const Block& b : stack)
    for (std::size_t j = 0; j < b.count; ++j) out[pos++] = b.mean();
  return out;
}

}  // namespace fhslab
