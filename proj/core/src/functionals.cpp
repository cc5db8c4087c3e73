#include "fhslab/functionals.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fhslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double pow_abs(double d, double gamma) {
  if (d == 0.0) return 0.0;
  const double a = std::abs(d);
  if (gamma == 2.0) return a * a;
  if (gamma == 1.0) return a;
  return std::pow(a, gamma);
}

inline double sgn(double d) { return d < 0.0 ? -1.0 : (d > 0.0 ? 1.0 : 0.0); }

// Gauss-Legendre rules mapped to [0,1].
template <int n>
struct Rule01 {
  std::array<double, n> x{}, w{};
  Rule01() {
    using G = boost::math::quadrature::gauss<double, n>;
    const auto& xs = G::abscissa();
    const auto& ws = G::weights();
    int k = 0;
    const bool odd = (n % 2) != 0;
    if (odd) {
      x[k] = 0.5;
      w[k] = ws[0] / 2.0;
      ++k;
    }
    for (std::size_t i = odd ? 1 : 0; i < xs.size(); ++i) {
      x[k] = 0.5 * (1.0 - xs[i]);
      w[k] = ws[i] / 2.0;
      ++k;
      x[k] = 0.5 * (1.0 + xs[i]);
      w[k] = ws[i] / 2.0;
      ++k;
    }
  }
};
const Rule01<6>& gl6() { static const Rule01<6> r; return r; }
const Rule01<4>& gl4() { static const Rule01<4> r; return r; }
const Rule01<8>& gl8() { static const Rule01<8> r; return r; }

// ---------------------------------------------------------------------------
// Extended axis: the grid nodes, a geometric outer extension (the outer
// integral stops there; the self-similar tail-tail block covers the rest),
// and a further inner extension so every center sees discrete neighbours out
// to the horizon where the kernel far-field series is valid.

struct Axis {
  int N = 1;
  double s = 0.0, gamma = 0.0, beta = 0.0;
  EngineOptions opt;
  Grid grid;
  std::shared_ptr<const KernelContext> ctx;

  std::vector<double> x, xNm1, xm1b;  // nodes, x^{N-1}, x^{-1-beta}
  std::size_t n_core = 0, n = 0, i_oe = 0;
  double zeta = 0.0;
  std::vector<double> kap;  // kappa_ratio(zeta^d)
  std::vector<double> wr;   // zeta^{d(N-1)} kap[d]
  std::vector<double> cw;   // outer trapezoid weights on [0, x[i_oe]]

  double nu() const { return (N - 1) / 2.0; }
};

Axis build_axis(const Grid& grid, int N, double s, double gamma,
                const EngineOptions& opt) {
  Axis A;
  A.N = N;
  A.s = s;
  A.gamma = gamma;
  A.beta = gamma * s;
  A.opt = opt;
  A.grid = grid;
  if (!(A.beta > 0.0 && A.beta < 2.0))
    throw std::invalid_argument("gamma*s must lie in ]0,2[");
  if (!(gamma - A.beta > 0.0))
    throw std::invalid_argument("need gamma*(1-s) > 0");
  A.ctx = KernelContext::get(N, A.beta);
  A.zeta = grid.ratio();

  A.x = grid.nodes();
  A.n_core = A.x.size();
  const double x_oe_target = grid.r_max * std::pow(10.0, opt.outer_extend_decades);
  while (A.x.back() < x_oe_target) A.x.push_back(A.x.back() * A.zeta);
  A.i_oe = A.x.size() - 1;
  const double x_in_target = opt.inner_horizon * A.x[A.i_oe];
  while (A.x.back() < x_in_target) A.x.push_back(A.x.back() * A.zeta);
  A.n = A.x.size();

  A.xNm1.resize(A.n);
  A.xm1b.resize(A.n);
  for (std::size_t j = 0; j < A.n; ++j) {
    A.xNm1[j] = (j == 0) ? (N == 1 ? 1.0 : 0.0) : std::pow(A.x[j], N - 1.0);
    A.xm1b[j] = (j == 0) ? 0.0 : std::pow(A.x[j], -1.0 - A.beta);
  }
  A.kap.assign(A.n, 0.0);
  A.wr.assign(A.n, 0.0);
  for (std::size_t d = 1; d < A.n; ++d) {
    const double w = std::pow(A.zeta, static_cast<double>(d));
    A.kap[d] = A.ctx->kappa_ratio(w);
    A.wr[d] = std::pow(w, N - 1.0) * A.kap[d];
  }
  A.cw.assign(A.n, 0.0);
  for (std::size_t j = 0; j <= A.i_oe; ++j) {
    if (j > 0) A.cw[j] += 0.5 * (A.x[j] - A.x[j - 1]);
    if (j < A.i_oe) A.cw[j] += 0.5 * (A.x[j + 1] - A.x[j]);
  }
  return A;
}

struct Bound {
  std::vector<double> uv;      // profile values on the extended axis
  std::vector<double> vchain;  // d uv[j] / d u(r_max), virtual nodes only
  std::size_t n_core = 0;
  double c_abs = 0.0, kappa = 0.0;
  bool tail = false;
};

Bound bind_profile(const Axis& A, const RadialProfile& u) {
  if (u.mode != InterpMode::Linear)
    throw std::invalid_argument("engine requires piecewise-linear mode");
  if (!(u.grid == A.grid)) throw std::invalid_argument("grid mismatch");
  Bound B;
  B.n_core = A.n_core;
  B.kappa = u.tail_exponent;
  B.c_abs = u.tail_coefficient();
  B.tail = B.c_abs > 0.0;
  B.uv.resize(A.n);
  B.vchain.assign(A.n - A.n_core, 0.0);
  const double uM = u.values.back();
  for (std::size_t j = 0; j < A.n; ++j) {
    if (j < A.n_core) {
      B.uv[j] = u.values[j];
    } else {
      const double fac = std::pow(A.x[j] / A.grid.r_max, -B.kappa);
      B.uv[j] = uM * fac;
      B.vchain[j - A.n_core] = fac;
    }
  }
  return B;
}

// routes virtual-node sensitivities through the tail's continuity pin
struct GradAcc {
  const Bound* B;
  std::vector<double>* g;
  void add(std::size_t j, double v) const {
    if (!g) return;
    if (j < B->n_core)
      (*g)[j] += v;
    else
      (*g)[B->n_core - 1] += v * B->vchain[j - B->n_core];
  }
};

// ---------------------------------------------------------------------------
// flank factor: contribution of one cell touching the center, divided by
// |slope|^gamma c^{gamma-beta}. The kernel splits into the diagonal model
// A (r rho)^{-(N-1)/2}|r-rho|^{-(1+beta)} whose frozen-slope integral is a
// binomial series (terminating for odd N), plus a smooth remainder (Gauss).
double flank_factor(const Axis& A, double delta, int sigma) {
  const double g = A.gamma, beta = A.beta, nu = A.nu();
  const int K = delta > 0.9 ? 96 : 16;
  double series = 0.0, binom = 1.0, sig = 1.0;
  for (int k = 0; k <= K; ++k) {
    series += binom * sig * std::pow(delta, g - beta + k) / (g - beta + k);
    binom *= (nu - k) / (k + 1.0);
    sig *= sigma;
    if (binom == 0.0) break;
  }
  double val = A.ctx->diag_coef() * series;

  const auto& R = gl6();
  double rem = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double xi = R.x[i];
    double fac;
    if (sigma > 0) {
      const double w = 1.0 + delta * xi;
      fac = std::pow(w, A.N - 1.0) * A.ctx->ratio_remainder(w);
    } else {
      const double rc = 1.0 - delta * xi;
      fac = std::pow(rc, -1.0 - beta) * A.ctx->ratio_remainder(1.0 / rc);
    }
    rem += R.w[i] * std::pow(xi, g) * fac;
  }
  val += std::pow(delta, g + 1.0) * rem;
  return val;
}

struct FlankBCache {
  double Bl_std = 0.0, Br_std = 0.0, Bl_first = 0.0;
  double dl_std = 0.0, dr_std = 0.0;
};

FlankBCache make_flank_cache(const Axis& A) {
  FlankBCache c;
  c.dl_std = 1.0 - 1.0 / A.zeta;
  c.dr_std = A.zeta - 1.0;
  c.Bl_std = flank_factor(A, c.dl_std, -1);
  c.Br_std = flank_factor(A, c.dr_std, +1);
  c.Bl_first = flank_factor(A, 1.0, -1);  // center x_1, left flank reaches r=0
  return c;
}

// ---------------------------------------------------------------------------
// inner integral of |u(c)-u(rho)|^gamma rho^{N-1} K(c,rho) over rho in
// [0,inf) for the center node i, split into rho <= x[i_oe] (weighted wm) and
// beyond (weighted wb); the symmetric assembly uses wb = 2 wm.

template <bool WithGrad>
double center_eval(const Axis& A, const Bound& B, const FlankBCache& FC,
                   std::size_t i, double wm, double wb,
                   std::vector<double>* grad) {
  const GradAcc acc{&B, grad};
  const double c = A.x[i];
  const double u_c = B.uv[i];
  const double g = A.gamma, beta = A.beta;
  const std::size_t W = static_cast<std::size_t>(A.opt.window);
  double total = 0.0;

  const double cgb = c > 0.0 ? std::pow(c, g - beta) : 0.0;
  const double cm1b = c > 0.0 ? std::pow(c, -1.0 - beta) : 0.0;
  const double sphere = A.ctx->sphere();

  const auto flank = [&](std::size_t cell, int sigma, double wgt) {
    const double den = A.x[cell + 1] - A.x[cell];
    const double m = (B.uv[cell + 1] - B.uv[cell]) / den;
    double C;
    if (c == 0.0) {
      // K(0,rho) = |S| rho^{-(N+beta)} exactly, no remainder
      C = sphere * std::pow(den, g - beta) / (g - beta);
    } else {
      const double delta = den / c;
      double Bf;
      if (sigma > 0 && std::abs(delta - FC.dr_std) < 1e-12 * FC.dr_std)
        Bf = FC.Br_std;
      else if (sigma < 0 && std::abs(delta - FC.dl_std) < 1e-12 * FC.dl_std)
        Bf = FC.Bl_std;
      else if (sigma < 0 && cell == 0 && A.x[0] == 0.0)
        Bf = FC.Bl_first;
      else
        Bf = flank_factor(A, delta, sigma);
      C = cgb * Bf;
    }
    total += wgt * pow_abs(m, g) * C;
    if constexpr (WithGrad) {
      if (m != 0.0) {
        const double dm = wgt * g * pow_abs(m, g - 1.0) * sgn(m) * C / den;
        acc.add(cell + 1, dm);
        acc.add(cell, -dm);
      }
    }
  };

  const auto gauss_cell = [&](std::size_t k, double wgt) {
    const double a = A.x[k], b = A.x[k + 1];
    const double dk = b - a;
    const auto& R = gl6();
    for (int q = 0; q < 6; ++q) {
      const double xi = R.x[q];
      const double rho = a + dk * xi;
      const double uq = (1.0 - xi) * B.uv[k] + xi * B.uv[k + 1];
      const double wfac = c == 0.0
                              ? sphere * std::pow(rho, -1.0 - beta)
                              : std::pow(rho, A.N - 1.0) * A.ctx->kernel(c, rho);
      const double d = u_c - uq;
      const double coef = wgt * dk * R.w[q] * wfac;
      total += coef * pow_abs(d, g);
      if constexpr (WithGrad) {
        if (d != 0.0) {
          const double dd = coef * g * pow_abs(d, g - 1.0) * sgn(d);
          acc.add(i, dd);
          acc.add(k, -dd * (1.0 - xi));
          acc.add(k + 1, -dd * xi);
        }
      }
    }
  };

  const auto far_node = [&](std::size_t j, double wgt) {
    if (wgt == 0.0) return;
    double fac;
    if (j == 0) {
      if (A.N != 1 || c == 0.0) return;
      fac = sphere * cm1b;
    } else if (c == 0.0) {
      fac = sphere * A.xm1b[j];
    } else if (j < i) {
      fac = A.xm1b[j] * A.kap[i - j];
    } else {
      fac = cm1b * A.wr[j - i];
    }
    const double d = u_c - B.uv[j];
    total += wgt * fac * pow_abs(d, g);
    if constexpr (WithGrad) {
      if (d != 0.0) {
        const double dd = wgt * fac * g * pow_abs(d, g - 1.0) * sgn(d);
        acc.add(i, dd);
        acc.add(j, -dd);
      }
    }
  };

  const std::size_t cell_lo = i >= W ? i - W : 0;
  const std::size_t cell_hi = std::min(i + W - 1, A.n - 2);
  const std::size_t jL = cell_lo;
  const std::size_t jR = cell_hi + 1;

  std::size_t h = jR;
  {
    const double X = std::max(A.x[A.i_oe], A.opt.inner_horizon * c);
    while (h < A.n - 1 && A.x[h] < X) ++h;
  }

  const auto wgt_of_cell = [&](std::size_t cell) {
    return cell >= A.i_oe ? wb : wm;
  };

  if (i > 0) flank(i - 1, -1, wgt_of_cell(i - 1));
  flank(i, +1, wgt_of_cell(i));

  for (std::size_t k = cell_lo; k + 1 < i; ++k) gauss_cell(k, wgt_of_cell(k));
  for (std::size_t k = i + 1; k <= cell_hi; ++k) gauss_cell(k, wgt_of_cell(k));

  if (i >= W && jL >= 1) {
    for (std::size_t j = 0; j <= jL; ++j) {
      double wgt = 0.0;
      if (j > 0) wgt += 0.5 * (A.x[j] - A.x[j - 1]);
      if (j < jL) wgt += 0.5 * (A.x[j + 1] - A.x[j]);
      far_node(j, wgt * wm);
    }
  }

  if (jR < h) {
    for (std::size_t j = jR; j <= h; ++j) {
      double wgt = 0.0;
      if (j > jR) wgt += 0.5 * (A.x[j] - A.x[j - 1]) * (j - 1 >= A.i_oe ? wb : wm);
      if (j < h) wgt += 0.5 * (A.x[j + 1] - A.x[j]) * (j >= A.i_oe ? wb : wm);
      far_node(j, wgt);
    }
  }

  // far-field series: kernel asymptote |S| rho^{-1-beta}(1 + c2 (c/rho)^2)
  {
    const double X = A.x[h];
    const double c2 = A.ctx->far_c2();
    const double t0 = power_tail_integral(u_c, B.c_abs, B.kappa, g, beta, X);
    const double t2 = power_tail_integral(u_c, B.c_abs, B.kappa, g, beta + 2.0, X);
    total += wb * sphere * (t0 + c2 * c * c * t2);
    if constexpr (WithGrad) {
      const double s0 =
          power_tail_integral_signed(u_c, B.c_abs, B.kappa, g - 1.0, beta, X);
      const double s2 = power_tail_integral_signed(u_c, B.c_abs, B.kappa,
                                                   g - 1.0, beta + 2.0, X);
      acc.add(i, wb * sphere * g * (s0 + c2 * c * c * s2));
      if (B.tail) {
        const double sc0 = power_tail_integral_signed(
            u_c, B.c_abs, B.kappa, g - 1.0, beta + B.kappa, X);
        const double sc2 = power_tail_integral_signed(
            u_c, B.c_abs, B.kappa, g - 1.0, beta + 2.0 + B.kappa, X);
        (*grad)[B.n_core - 1] += -wb * sphere * g * (sc0 + c2 * c * c * sc2) *
                                 std::pow(A.grid.r_max, B.kappa);
      }
    }
  }

  return total;
}

// Tail-tail closed form past the outer end. For the pure power tail
// u = c rho^{-kappa} the substitution rho = w r collapses the double
// integral to
//   D(R) = 2 c^gamma R^{N - beta - gamma kappa} Y / (gamma kappa + beta - N),
// finite iff gamma (kappa + s) > N. Divergence is decided from the
// exponents, never from the numbers.
double tail_tail_block(const Axis& A, const Bound& B) {
  if (!B.tail) return 0.0;
  const double ex = A.gamma * B.kappa + A.beta - A.N;
  const double Y = A.ctx->tail_Y(A.gamma, B.kappa);
  const double R = A.x[A.i_oe];
  return 2.0 * std::pow(B.c_abs, A.gamma) * std::pow(R, -ex) * Y / ex;
}

bool tail_diverges(const RadialProfile& u, int N, double s, double gamma) {
  return u.has_tail() && gamma * (u.tail_exponent + s) <= static_cast<double>(N);
}

template <bool WithGrad>
double assemble_energy(const Axis& A, const Bound& B, const FlankBCache& FC,
                       std::vector<double>* grad) {
  const double sp = A.ctx->sphere();
  const int threads = std::max(1, A.opt.threads);

  const auto run_range = [&](std::size_t lo, std::size_t hi,
                             std::vector<double>* gpart) -> double {
    double e = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double scale = sp * A.cw[i] * A.xNm1[i];
      if (scale == 0.0) continue;
      e += center_eval<WithGrad>(A, B, FC, i, scale, 2.0 * scale, gpart);
    }
    return e;
  };

  double E = 0.0;
  if (threads == 1) {
    E = run_range(0, A.i_oe + 1, grad);
  } else {
    const std::size_t count = A.i_oe + 1;
    const std::size_t chunk = (count + threads - 1) / threads;
    std::vector<std::future<std::pair<double, std::vector<double>>>> futs;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = std::min(count, static_cast<std::size_t>(t) * chunk);
      const std::size_t hi = std::min(count, lo + chunk);
      futs.push_back(std::async(std::launch::async, [&, lo, hi] {
        std::vector<double> gpart;
        if (WithGrad) gpart.assign(A.n_core, 0.0);
        const double e = run_range(lo, hi, WithGrad ? &gpart : nullptr);
        return std::make_pair(e, std::move(gpart));
      }));
    }
    for (auto& f : futs) {
      auto [e, gpart] = f.get();
      E += e;
      if (WithGrad)
        for (std::size_t j = 0; j < gpart.size(); ++j) (*grad)[j] += gpart[j];
    }
  }

  E += tail_tail_block(A, B);
  if constexpr (WithGrad) {
    if (B.tail) {
      const double ex = A.gamma * B.kappa + A.beta - A.N;
      const double Y = A.ctx->tail_Y(A.gamma, B.kappa);
      const double R = A.x[A.i_oe];
      const double dDdc = 2.0 * A.gamma * std::pow(B.c_abs, A.gamma - 1.0) *
                          std::pow(R, -ex) * Y / ex;
      (*grad)[A.n_core - 1] += dDdc * std::pow(A.grid.r_max, B.kappa);
    }
  }
  return E;
}

// ---------------------------------------------------------------------------
// piecewise-constant path (closed-form oracles); needs beta < 1 so the raw
// kernel is integrable across the diagonal and cell values can jump.

double energy_pwconst(const RadialProfile& u, int N, double s, double gamma) {
  const double beta = gamma * s;
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("piecewise-constant mode needs gamma*s in ]0,1[");
  if (u.has_tail())
    throw std::invalid_argument("piecewise-constant mode needs compact support");
  auto ctx = KernelContext::get(N, beta);
  const auto& x = u.grid.nodes();
  const std::size_t m = x.size() - 1;
  for (std::size_t k = (3 * m) / 4; k < m; ++k)
    if (u.values[k] != 0.0)
      throw std::invalid_argument(
          "piecewise-constant mode needs support within the first 3/4 of the grid");

  const auto& R4 = gl4();
  double E = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = k + 1; l < m; ++l) {
      const double d = u.values[k] - u.values[l];
      if (d == 0.0) continue;
      double Wkl = 0.0;
      const double dl = x[k + 1] - x[k], dr = x[l + 1] - x[l];
      if (l == k + 1) {
        // corner-singular pair: model A c^{N-1} (xi+eta)^{-1-beta} closed
        // form plus smooth remainder
        const double c = x[l];
        const double tm = std::min(dl, dr), tM = std::max(dl, dr), T = dl + dr;
        double Irect = std::pow(tm, 1.0 - beta) / (1.0 - beta);
        Irect += tm * (std::pow(tm, -beta) - std::pow(tM, -beta)) / beta;
        Irect += T * (std::pow(tM, -beta) - std::pow(T, -beta)) / beta -
                 (std::pow(T, 1.0 - beta) - std::pow(tM, 1.0 - beta)) /
                     (1.0 - beta);
        Wkl = ctx->diag_coef() * std::pow(c, N - 1.0) * Irect;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            const double r = x[k] + dl * R4.x[a];
            const double rho = x[l] + dr * R4.x[b];
            const double rem =
                std::pow(r, -(N + beta)) * ctx->ratio_remainder(rho / r);
            Wkl += dl * dr * R4.w[a] * R4.w[b] * std::pow(r * rho, N - 1.0) * rem;
          }
      } else {
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            const double r = x[k] + dl * R4.x[a];
            const double rho = x[l] + dr * R4.x[b];
            Wkl += dl * dr * R4.w[a] * R4.w[b] * std::pow(r * rho, N - 1.0) *
                   ctx->kernel(r, rho);
          }
      }
      E += 2.0 * pow_abs(d, gamma) * Wkl;
    }
  }

  // exterior block [r_max, inf): inner integral r^{-beta} KW(r_max/r)
  const double w_far = 1e3;
  const auto KW = [&](double Wlo) {
    double v = 0.0;
    double lo = Wlo;
    const auto& R8 = gl8();
    for (int pnl = 0; pnl < 12; ++pnl) {
      const double hi = Wlo * std::pow(w_far, (pnl + 1) / 12.0);
      for (int q = 0; q < 8; ++q) {
        const double w = lo + (hi - lo) * R8.x[q];
        v += (hi - lo) * R8.w[q] * std::pow(w, N - 1.0) * ctx->kappa_ratio(w);
      }
      lo = hi;
    }
    const double Wf = Wlo * w_far;
    v += ctx->sphere() *
         (std::pow(Wf, -beta) / beta +
          ctx->far_c2() * std::pow(Wf, -beta - 2.0) / (beta + 2.0));
    return v;
  };
  const auto& R6 = gl6();
  for (std::size_t k = 0; k < m; ++k) {
    if (u.values[k] == 0.0) continue;
    const double dl = x[k + 1] - x[k];
    double Wext = 0.0;
    for (int q = 0; q < 6; ++q) {
      const double r = x[k] + dl * R6.x[q];
      Wext += dl * R6.w[q] * std::pow(r, N - 1.0 - beta) * KW(u.grid.r_max / r);
    }
    E += 2.0 * pow_abs(u.values[k], gamma) * Wext;
  }

  return sphere_area(N) * E;
}

struct EnergyWork {
  Axis A;
  Bound B;
  FlankBCache FC;
};

EnergyWork prepare(const RadialProfile& u, int N, double s, double gamma,
                   const EngineOptions& opt) {
  EnergyWork w;
  w.A = build_axis(u.grid, N, s, gamma, opt);
  w.B = bind_profile(w.A, u);
  w.FC = make_flank_cache(w.A);
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------

double gagliardo_energy(const RadialProfile& u, int N, double s, double gamma,
                        const EngineOptions& opt) {
  if (u.mode == InterpMode::Constant) return energy_pwconst(u, N, s, gamma);
  if (tail_diverges(u, N, s, gamma)) return kInf;
  const auto w = prepare(u, N, s, gamma, opt);
  return assemble_energy<false>(w.A, w.B, w.FC, nullptr);
}

double gagliardo_seminorm(const RadialProfile& u, int N, double s, double gamma,
                          const EngineOptions& opt) {
  const double e = gagliardo_energy(u, N, s, gamma, opt);
  return std::isinf(e) ? kInf : std::pow(e, 1.0 / gamma);
}

std::vector<double> gagliardo_energy_gradient(const RadialProfile& u, int N,
                                              double s, double gamma,
                                              const EngineOptions& opt) {
  if (!(gamma > 1.0))
    throw std::invalid_argument("energy gradient needs gamma > 1");
  if (tail_diverges(u, N, s, gamma))
    throw std::invalid_argument("energy diverges; gradient undefined");
  const auto w = prepare(u, N, s, gamma, opt);
  std::vector<double> grad(w.A.n_core, 0.0);
  assemble_energy<true>(w.A, w.B, w.FC, &grad);
  return grad;
}

double energy_density(const RadialProfile& u, int N, double s, double gamma,
                      double r, const EngineOptions& opt) {
  if (!(r >= 0.0)) throw std::invalid_argument("density needs r >= 0");
  const auto w = prepare(u, N, s, gamma, opt);
  const Axis& A = w.A;
  const Bound& B = w.B;

  for (std::size_t i = 0; i + 1 < A.n; ++i)
    if (A.x[i] == r) return center_eval<false>(A, B, w.FC, i, 1.0, 1.0, nullptr);

  if (r > A.x[A.n - 2])
    throw std::invalid_argument("density center beyond the extended axis");

  // interior center: split its cell into two frozen-slope flanks, Gauss on
  // the window, trapezoid beyond, then the far-field series.
  std::size_t cell = 0;
  while (cell + 2 < A.n && A.x[cell + 1] <= r) ++cell;
  const double u_c = u.eval(r);
  const double g = A.gamma, beta = A.beta;
  double total = 0.0;

  const double m = (B.uv[cell + 1] - B.uv[cell]) / (A.x[cell + 1] - A.x[cell]);
  if (r > A.x[cell])
    total += pow_abs(m, g) * std::pow(r, g - beta) *
             flank_factor(A, (r - A.x[cell]) / r, -1);
  if (A.x[cell + 1] > r)
    total += pow_abs(m, g) * std::pow(r, g - beta) *
             flank_factor(A, (A.x[cell + 1] - r) / r, +1);

  const std::size_t W = static_cast<std::size_t>(A.opt.window);
  const auto& R6 = gl6();
  const std::size_t cl = cell >= W ? cell - W : 0;
  const std::size_t ch = std::min(cell + W, A.n - 2);
  for (std::size_t k = cl; k <= ch; ++k) {
    if (k == cell) continue;
    const double a = A.x[k], b = A.x[k + 1], dk = b - a;
    for (int q = 0; q < 6; ++q) {
      const double rho = a + dk * R6.x[q];
      const double uq = (1.0 - R6.x[q]) * B.uv[k] + R6.x[q] * B.uv[k + 1];
      total += dk * R6.w[q] * pow_abs(u_c - uq, g) * std::pow(rho, N - 1.0) *
               A.ctx->kernel(r, rho);
    }
  }
  if (cl >= 1) {
    for (std::size_t j = 0; j <= cl; ++j) {
      double wgt = 0.0;
      if (j > 0) wgt += 0.5 * (A.x[j] - A.x[j - 1]);
      if (j < cl) wgt += 0.5 * (A.x[j + 1] - A.x[j]);
      if (j == 0) {
        if (N == 1)
          total += wgt * pow_abs(u_c - B.uv[0], g) * A.ctx->sphere() *
                   std::pow(r, -1.0 - beta);
        continue;
      }
      total += wgt * pow_abs(u_c - B.uv[j], g) * std::pow(A.x[j], N - 1.0) *
               A.ctx->kernel(r, A.x[j]);
    }
  }
  std::size_t h = ch + 1;
  const double X_target = std::max(A.x[A.i_oe], A.opt.inner_horizon * r);
  while (h < A.n - 1 && A.x[h] < X_target) ++h;
  for (std::size_t j = ch + 1; j <= h; ++j) {
    double wgt = 0.0;
    if (j > ch + 1) wgt += 0.5 * (A.x[j] - A.x[j - 1]);
    if (j < h) wgt += 0.5 * (A.x[j + 1] - A.x[j]);
    total += wgt * pow_abs(u_c - B.uv[j], g) * std::pow(A.x[j], N - 1.0) *
             A.ctx->kernel(r, A.x[j]);
  }
  const double X = A.x[h];
  total += A.ctx->sphere() *
           (power_tail_integral(u_c, B.c_abs, B.kappa, g, beta, X) +
            A.ctx->far_c2() * r * r *
                power_tail_integral(u_c, B.c_abs, B.kappa, g, beta + 2.0, X));
  return total;
}

// ---------------------------------------------------------------------------
// weighted norms

double weighted_norm(const RadialProfile& u, int N, double alpha, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("weighted norm needs q > 0");
  if (!(alpha >= 0.0 && alpha < static_cast<double>(N)))
    throw std::invalid_argument("weighted norm needs 0 <= alpha < N");
  const auto& x = u.grid.nodes();
  const std::size_t m = x.size() - 1;
  double acc = 0.0;
  if (u.mode == InterpMode::Constant) {
    for (std::size_t k = 0; k < m; ++k) {
      if (u.values[k] == 0.0) continue;
      acc += std::pow(u.values[k], q) *
             (std::pow(x[k + 1], N - alpha) - std::pow(x[k], N - alpha)) /
             (N - alpha);
    }
  } else {
    const auto& R6 = gl6();
    {
      // first cell: tau = rho^{N-alpha} absorbs the weight exactly
      const double T = std::pow(x[1], N - alpha);
      for (int i = 0; i < 6; ++i) {
        const double tau = T * R6.x[i];
        const double rho = std::pow(tau, 1.0 / (N - alpha));
        const double wq = rho / x[1];
        const double uq = (1.0 - wq) * u.values[0] + wq * u.values[1];
        acc += T * R6.w[i] * std::pow(uq, q) / (N - alpha);
      }
    }
    for (std::size_t k = 1; k < m; ++k) {
      const double a = x[k], b = x[k + 1], dk = b - a;
      for (int i = 0; i < 6; ++i) {
        const double rho = a + dk * R6.x[i];
        const double uq =
            (1.0 - R6.x[i]) * u.values[k] + R6.x[i] * u.values[k + 1];
        acc += dk * R6.w[i] * std::pow(uq, q) * std::pow(rho, N - 1.0 - alpha);
      }
    }
  }
  if (u.has_tail()) {
    const double ex = q * u.tail_exponent - (N - alpha);
    if (ex <= 0.0) return kInf;
    acc += std::pow(u.values.back(), q) * std::pow(u.grid.r_max, N - alpha) / ex;
  }
  return std::pow(sphere_area(N) * acc, 1.0 / q);
}

double radial_Lq_norm_samples(const Grid& grid, const std::vector<double>& vals,
                              int N, double alpha, double q, double tail_exp) {
  if (vals.size() != grid.node_count())
    throw std::invalid_argument("sample count mismatch");
  const auto& x = grid.nodes();
  const std::size_t m = x.size() - 1;
  const auto& R6 = gl6();
  double acc = 0.0;
  {
    const double T = std::pow(x[1], N - alpha);
    for (int i = 0; i < 6; ++i) {
      const double tau = T * R6.x[i];
      const double rho = std::pow(tau, 1.0 / (N - alpha));
      const double wq = rho / x[1];
      const double uq = (1.0 - wq) * vals[0] + wq * vals[1];
      acc += T * R6.w[i] * pow_abs(uq, q) / (N - alpha);
    }
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double a = x[k], b = x[k + 1], dk = b - a;
    for (int i = 0; i < 6; ++i) {
      const double rho = a + dk * R6.x[i];
      const double uq = (1.0 - R6.x[i]) * vals[k] + R6.x[i] * vals[k + 1];
      acc += dk * R6.w[i] * pow_abs(uq, q) * std::pow(rho, N - 1.0 - alpha);
    }
  }
  const double vM = std::abs(vals.back());
  if (vM > 0.0 && tail_exp > 0.0) {
    const double ex = q * tail_exp - (N - alpha);
    if (ex <= 0.0) return kInf;
    acc += std::pow(vM, q) * std::pow(grid.r_max, N - alpha) / ex;
  }
  return std::pow(sphere_area(N) * acc, 1.0 / q);
}

double rayleigh_quotient(const RadialProfile& u, const ProblemParams& pp,
                         const EngineOptions& opt) {
  const double E = gagliardo_energy(u, pp.N, pp.s, pp.p, opt);
  const double nrm = weighted_norm(u, pp.N, pp.alpha, pp.q);
  if (!(nrm > 0.0))
    throw std::invalid_argument("Rayleigh quotient of the zero profile");
  if (std::isinf(E) || std::isinf(nrm)) return kInf;
  return E / std::pow(nrm, pp.p);
}

FunctionalReport functional_report(const RadialProfile& u,
                                   const ProblemParams& pp,
                                   const EngineOptions& opt) {
  FunctionalReport rep;
  rep.seminorm_s_p = gagliardo_seminorm(u, pp.N, pp.s, pp.p, opt);
  rep.weighted_norm_alpha_q = weighted_norm(u, pp.N, pp.alpha, pp.q);
  rep.rayleigh = std::pow(rep.seminorm_s_p, pp.p) /
                 std::pow(rep.weighted_norm_alpha_q, pp.p);

  const RadialProfile fine = u.resampled(u.grid.refined());
  const double sem2 = gagliardo_seminorm(fine, pp.N, pp.s, pp.p, opt);
  const double nrm2 = weighted_norm(fine, pp.N, pp.alpha, pp.q);
  const double ray2 = std::pow(sem2, pp.p) / std::pow(nrm2, pp.p);
  const auto rel = [](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return 0.0;
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
  };
  rep.seminorm_delta = rel(rep.seminorm_s_p, sem2);
  rep.weighted_norm_delta = rel(rep.weighted_norm_alpha_q, nrm2);
  rep.rayleigh_delta = rel(rep.rayleigh, ray2);
  rep.refinement_delta = std::max(
      {rep.seminorm_delta, rep.weighted_norm_delta, rep.rayleigh_delta});
  return rep;
}

double weak_lq_quasinorm(const RadialProfile& u, int N, double q) {
  if (!u.nonincreasing(1e-12 * std::max(1.0, u.values.front())))
    throw std::invalid_argument(
        "weak quasi-norm implemented for monotone profiles");
  const double wN = unit_ball_volume(N);
  double best = 0.0;
  const auto& x = u.grid.nodes();
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double k = u.values[i];
    if (k <= 0.0) continue;
    best = std::max(best, k * std::pow(wN * std::pow(x[i], N), 1.0 / q));
  }
  if (u.has_tail() && static_cast<double>(N) / q > u.tail_exponent) return kInf;
  return best;
}

// ---------------------------------------------------------------------------
// pointwise fractional p-Laplacian

namespace {

struct PlapFlank {
  double value = 0.0;
  bool kinked = false;
};

// Combined two-sided flank of the principal value at a node, with u modelled
// by the local quadratic u(c +- t) = u(c) +- mbar t + (q/2) t^2 matching the
// one-sided slopes (mbar their mean, q the slope jump over the mean cell).
// The odd frozen-slope part cancels between the sides up to the kernel
// asymmetry g_l - g_r ~ t (an exact series); the even curvature remainder is
// integrable for every p, s and carries the second-order information that a
// raw kink would misplace. At a genuine kink with p - 1 <= ps the pointwise
// operator diverges; the model value is returned and the node flagged.
PlapFlank plap_flank_node(const Axis& A, const Bound& B, std::size_t i) {
  PlapFlank out;
  const double c = A.x[i];
  const double p = A.gamma, beta = A.beta, nu = A.nu();
  const double A0 = A.ctx->diag_coef();
  const auto& R6 = gl6();
  const auto& R8 = gl8();

  const bool has_left = i > 0;
  const double dl = has_left ? A.x[i] - A.x[i - 1] : 0.0;
  const double dr = A.x[i + 1] - A.x[i];
  const double ml = has_left ? (B.uv[i] - B.uv[i - 1]) / dl : 0.0;
  const double mr = (B.uv[i + 1] - B.uv[i]) / dr;

  if (c == 0.0) {
    // origin: K(0,rho) = |S| rho^{-(N+beta)}; the linear part converges only
    // for p-1 > beta
    const double Jr = pow_abs(mr, p - 1.0) * sgn(mr);
    if (p - 1.0 > beta) {
      out.value = -Jr * A.ctx->sphere() * std::pow(dr, p - 1.0 - beta) /
                  (p - 1.0 - beta);
    } else if (mr != 0.0) {
      out.kinked = true;
    }
    return out;
  }

  const double mbar = has_left ? 0.5 * (ml + mr) : mr;
  const double q = has_left ? (mr - ml) / (0.5 * (dl + dr)) : 0.0;
  const double Jm = pow_abs(mbar, p - 1.0) * sgn(mbar);
  const double dm = (has_left ? std::min(dl, dr) : dr) / c;

  // kernel side weights without the outer c^{-1-beta}:
  //   g_l = A tau^{-1-beta}(1-tau)^nu + (1-tau)^{-1-beta} Rt(1/(1-tau))
  //   g_r = A tau^{-1-beta}(1+tau)^nu + (1+tau)^{N-1} Rt(1+tau)
  const auto g_reg_l = [&](double tau) {
    return std::pow(1.0 - tau, -1.0 - beta) *
           A.ctx->ratio_remainder(1.0 / (1.0 - tau));
  };
  const auto g_reg_r = [&](double tau) {
    return std::pow(1.0 + tau, A.N - 1.0) * A.ctx->ratio_remainder(1.0 + tau);
  };

  // odd frozen-slope part: J(mbar) int t^{p-1} (g_l - g_r) dt
  if (Jm != 0.0 && has_left) {
    double S1 = 0.0, bin = 1.0;
    for (int k = 1; k <= 21; ++k) {
      bin *= (nu - (k - 1)) / k;
      if (bin == 0.0) break;
      if (k % 2 == 1)
        S1 += -2.0 * bin * std::pow(dm, p - 1.0 - beta + k) /
              (p - 1.0 - beta + k);
    }
    double S2 = 0.0;
    for (int qn = 0; qn < 6; ++qn) {
      const double tau = dm * R6.x[qn];
      S2 += dm * R6.w[qn] * std::pow(tau, p - 1.0) * (g_reg_l(tau) - g_reg_r(tau));
    }
    out.value += Jm * std::pow(c, p - 1.0 - beta) * (A0 * S1 + S2);
  }

  // curvature remainder R(t) = [J(mbar t - q t^2/2) - J(mbar t)] g_l
  //                          + [J(-mbar t - q t^2/2) + J(mbar t)] g_r,
  // integrable like t^{p-1-beta}; substitute sigma = tau^{p-beta}
  if (has_left) {
    const double e1 = p - beta;
    const auto Rt = [&](double tau) -> double {
      const double t = c * tau;
      const double arg_l = mbar * t - 0.5 * q * t * t;
      const double arg_r = -mbar * t - 0.5 * q * t * t;
      const double Jt = Jm * std::pow(t, p - 1.0);
      const double bl = pow_abs(arg_l, p - 1.0) * sgn(arg_l) - Jt;
      const double br = pow_abs(arg_r, p - 1.0) * sgn(arg_r) + Jt;
      const double gl = A0 * std::pow(tau, -1.0 - beta) * std::pow(1.0 - tau, nu) +
                        g_reg_l(tau);
      const double gr = A0 * std::pow(tau, -1.0 - beta) * std::pow(1.0 + tau, nu) +
                        g_reg_r(tau);
      return bl * gl + br * gr;
    };
    double curv = 0.0;
    const double sig_top = std::pow(dm, e1);
    for (int qn = 0; qn < 8; ++qn) {
      const double sig = sig_top * R8.x[qn];
      const double tau = std::pow(sig, 1.0 / e1);
      curv += sig_top * R8.w[qn] * Rt(tau) * std::pow(sig, 1.0 / e1 - 1.0) / e1;
    }
    // dt = c dtau against the side weights' c^{-1-beta}
    out.value += std::pow(c, -beta) * curv;
    if (p - 1.0 <= beta &&
        std::abs(ml - mr) > 1e-6 * (std::abs(ml) + std::abs(mr) + 1e-300))
      out.kinked = true;
  }

  // leftover single-sided stretch of the longer flank cell (exact linear u)
  const double tmin = has_left ? std::min(dl, dr) : 0.0;
  const double tmax = has_left ? std::max(dl, dr) : dr;
  if (tmax > tmin) {
    const bool right_longer = !has_left || dr > dl;
    for (int qn = 0; qn < 6; ++qn) {
      const double t = tmin + (tmax - tmin) * R6.x[qn];
      const double rho = right_longer ? c + t : c - t;
      const double uq = right_longer ? B.uv[i] + mr * t : B.uv[i] - ml * t;
      const double d = B.uv[i] - uq;
      out.value += (tmax - tmin) * R6.w[qn] * pow_abs(d, p - 1.0) * sgn(d) *
                   std::pow(rho, A.N - 1.0) * A.ctx->kernel(c, rho);
    }
  }
  return out;
}

}  // namespace

std::vector<double> frac_p_laplacian(const RadialProfile& u,
                                     const ProblemParams& pp,
                                     std::vector<unsigned char>* kink_flags,
                                     const EngineOptions& opt) {
  const auto w = prepare(u, pp.N, pp.s, pp.p, opt);
  const Axis& A = w.A;
  const Bound& B = w.B;
  const double p = pp.p, beta = A.beta;
  const std::size_t W = static_cast<std::size_t>(A.opt.window);

  std::vector<double> f(A.n_core, 0.0);
  if (kink_flags) kink_flags->assign(A.n_core, 0);
  const auto& R6 = gl6();

  for (std::size_t i = 0; i < A.n_core; ++i) {
    const double c = A.x[i], u_c = B.uv[i];
    double total = 0.0;

    const PlapFlank fl = plap_flank_node(A, B, i);
    total += fl.value;
    if (fl.kinked && kink_flags) (*kink_flags)[i] = 1;

    const std::size_t cell_lo = i >= W ? i - W : 0;
    const std::size_t cell_hi = std::min(i + W - 1, A.n - 2);
    const double cm1b = c > 0.0 ? std::pow(c, -1.0 - beta) : 0.0;
    const auto wfac = [&](double rho) {
      if (c == 0.0) return A.ctx->sphere() * std::pow(rho, -1.0 - beta);
      return std::pow(rho, pp.N - 1.0) * A.ctx->kernel(c, rho);
    };
    for (std::size_t k = cell_lo; k <= cell_hi; ++k) {
      if (k == i || k + 1 == i) continue;  // flank cells
      const double a = A.x[k], b = A.x[k + 1], dk = b - a;
      for (int qn = 0; qn < 6; ++qn) {
        const double rho = a + dk * R6.x[qn];
        const double uq = (1.0 - R6.x[qn]) * B.uv[k] + R6.x[qn] * B.uv[k + 1];
        const double d = u_c - uq;
        total += dk * R6.w[qn] * pow_abs(d, p - 1.0) * sgn(d) * wfac(rho);
      }
    }
    const std::size_t jL = cell_lo;
    if (i >= W && jL >= 1) {
      for (std::size_t j = 0; j <= jL; ++j) {
        double wgt = 0.0;
        if (j > 0) wgt += 0.5 * (A.x[j] - A.x[j - 1]);
        if (j < jL) wgt += 0.5 * (A.x[j + 1] - A.x[j]);
        double fac;
        if (j == 0) {
          if (pp.N != 1 || c == 0.0) continue;
          fac = A.ctx->sphere() * cm1b;
        } else {
          fac = A.xm1b[j] * A.kap[i - j];
        }
        const double d = u_c - B.uv[j];
        total += wgt * fac * pow_abs(d, p - 1.0) * sgn(d);
      }
    }
    std::size_t h = cell_hi + 1;
    {
      const double X = std::max(A.x[A.i_oe], A.opt.inner_horizon * c);
      while (h < A.n - 1 && A.x[h] < X) ++h;
    }
    const std::size_t jR = cell_hi + 1;
    if (jR < h) {
      for (std::size_t j = jR; j <= h; ++j) {
        double wgt = 0.0;
        if (j > jR) wgt += 0.5 * (A.x[j] - A.x[j - 1]);
        if (j < h) wgt += 0.5 * (A.x[j + 1] - A.x[j]);
        const double fac = c == 0.0 ? A.ctx->sphere() * A.xm1b[j]
                                    : cm1b * A.wr[j - i];
        const double d = u_c - B.uv[j];
        total += wgt * fac * pow_abs(d, p - 1.0) * sgn(d);
      }
    }
    {
      const double X = A.x[h];
      total +=
          A.ctx->sphere() *
          (power_tail_integral_signed(u_c, B.c_abs, B.kappa, p - 1.0, beta, X) +
           A.ctx->far_c2() * c * c *
               power_tail_integral_signed(u_c, B.c_abs, B.kappa, p - 1.0,
                                          beta + 2.0, X));
    }
    f[i] = 2.0 * total;
  }
  return f;
}

double frac_p_laplacian_at(const RadialProfile& u, const ProblemParams& pp,
                           double r, const EngineOptions& opt) {
  const auto& x = u.grid.nodes();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] == r) {
      const auto f = frac_p_laplacian(u, pp, nullptr, opt);
      return f[i];
    }
  throw std::invalid_argument("pointwise operator evaluated at grid nodes only");
}

}  // namespace fhslab
