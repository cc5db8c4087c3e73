#include <doctest.h>

#include <cmath>

#include "fhslab/layers.hpp"

using namespace fhslab;

namespace {
const Grid kGrid(1e-3, 1e4, 256);
}

TEST_CASE("layer decomposition of the candidate extremal") {
  const auto pp = make_params(3, 2.0, 0.5, 0.0);
  const auto U = candidate_extremal(pp, kGrid);
  const auto dec = layer_cake_decompose(U);
  REQUIRE(dec.truncation_index >= 4);
  REQUIRE(dec.layers.size() == std::size_t(dec.truncation_index) + 1);

  SUBCASE("each layer is capped by the band height and supported in B_{2^i}") {
    for (int i = 1; i <= dec.truncation_index; ++i) {
      const auto& layer = dec.layers[std::size_t(i)];
      const double cap = U.eval(std::pow(2.0, i - 1)) - U.eval(std::pow(2.0, i));
      for (std::size_t j = 0; j < layer.size(); ++j) {
        CHECK(layer.values[j] >= 0.0);
        CHECK(layer.values[j] <= cap * (1.0 + 1e-12));
        if (kGrid.node(j) >= std::pow(2.0, i)) CHECK(layer.values[j] == 0.0);
      }
    }
  }

  SUBCASE("sup norms are bounded by the decayed base heights") {
    // ||u_i||_inf <= u(2^{i-1}) <= C 2^{-2(i-1)} here (decay exponent 2)
    for (int i = 1; i <= dec.truncation_index; ++i) {
      const auto& layer = dec.layers[std::size_t(i)];
      double sup = 0.0;
      for (double v : layer.values) sup = std::max(sup, v);
      CHECK(sup <= dec.base_heights[std::size_t(i)] * (1.0 + 1e-12));
      const double bound = 4.0 * std::pow(2.0, -2.0 * (i - 1));
      CHECK(dec.base_heights[std::size_t(i)] <= bound);
    }
  }

  SUBCASE("partial sums telescope to u - u(2^K) at every node") {
    const double floor_val = U.eval(std::pow(2.0, dec.truncation_index));
    for (std::size_t j = 0; j < U.size(); ++j) {
      double sum = 0.0;
      for (const auto& layer : dec.layers) sum += layer.values[j];
      CHECK(std::abs(U.values[j] - sum) <= floor_val * (1.0 + 1e-9) + 1e-15);
    }
  }
}

TEST_CASE("constant-zero profile decomposes into zero layers") {
  std::vector<double> z(kGrid.node_count(), 0.0);
  const RadialProfile zero(kGrid, std::move(z), 2.0);
  const auto dec = layer_cake_decompose(zero, 5);
  for (const auto& layer : dec.layers)
    for (double v : layer.values) CHECK(v == 0.0);
}

TEST_CASE("non-monotone input is rejected") {
  std::vector<double> v(kGrid.node_count(), 0.0);
  v[10] = 1.0;  // bump upward
  v[9] = 0.2;
  const RadialProfile bad(kGrid, std::move(v), 2.0);
  CHECK_THROWS(layer_cake_decompose(bad));
}
