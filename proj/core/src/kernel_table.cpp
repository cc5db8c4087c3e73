#include "fhslab/kernel_table.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fhslab {

namespace {
constexpr std::size_t kDefaultBudget = std::size_t(1) << 30;  // 1 GiB

static_assert(sizeof(double) == 8, "need 64-bit doubles");

void put_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}
}  // namespace

KernelTable::KernelTable(int N, double beta, const Grid& grid,
                         std::size_t memory_budget_bytes)
    : N_(N), beta_(beta) {
  const std::size_t n = grid.node_count();
  const std::size_t budget =
      memory_budget_bytes ? memory_budget_bytes : kDefaultBudget;
  if (n * n * sizeof(double) > budget) {
    const std::size_t max_n =
        static_cast<std::size_t>(std::sqrt(double(budget) / sizeof(double)));
    throw std::runtime_error(
        "kernel table would exceed the memory budget; reduce M to about " +
        std::to_string(max_n > 2 ? max_n - 2 : 8));
  }
  auto ctx = KernelContext::get(N, beta);
  diag_coef_ = ctx->diag_coef();
  radii_ = grid.nodes();
  entries_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = ctx->kernel(radii_[i], radii_[j]);
      entries_[i * n + j] = v;
      entries_[j * n + i] = v;
    }
  }
}

void KernelTable::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  put_u32(os, static_cast<std::uint32_t>(N_));
  put_u32(os, static_cast<std::uint32_t>(radii_.size()));
  double b = beta_;
  os.write(reinterpret_cast<const char*>(&b), sizeof(double));
  os.write(reinterpret_cast<const char*>(entries_.data()),
           static_cast<std::streamsize>(entries_.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write to " + path);
}

KernelTable KernelTable::load(const std::string& path, const Grid& grid,
                              int expect_N) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  KernelTable t;
  const std::uint32_t n_file = [&] {
    const std::uint32_t N_file = get_u32(is);
    t.N_ = static_cast<int>(N_file);
    return get_u32(is);
  }();
  is.read(reinterpret_cast<char*>(&t.beta_), sizeof(double));
  if (t.N_ != expect_N)
    throw std::runtime_error("kernel table dimension mismatch: file has N=" +
                             std::to_string(t.N_) + ", expected N=" +
                             std::to_string(expect_N));
  if (n_file != grid.node_count())
    throw std::runtime_error("kernel table node count mismatch");
  t.radii_ = grid.nodes();
  t.entries_.resize(std::size_t(n_file) * n_file);
  is.read(reinterpret_cast<char*>(t.entries_.data()),
          static_cast<std::streamsize>(t.entries_.size() * sizeof(double)));
  if (!is) throw std::runtime_error("short read from " + path);
  t.diag_coef_ = diag_singular_coefficient(t.N_, t.beta_);
  return t;
}

}  // namespace fhslab
