#pragma once

#include <memory>
#include <map>
#include <mutex>
#include <vector>

namespace fhslab {

// Surface measure |S^{N-1}| of the unit sphere.
double sphere_area(int N);
// Volume of the unit ball.
double unit_ball_volume(int N);

// Angular kernel
//   K(r,rho) = \int_{S^{N-1}} |r e_1 - rho w|^{-(N+beta)} dsigma(w),
// the radial reduction of the kernel |x-y|^{-(N+beta)}. Homogeneous:
// K(t r, t rho) = t^{-(N+beta)} K(r,rho). For N=1 the sphere is the two
// point set {-1,+1}; for N=3 the cos-substitution gives a closed form.
double angular_kernel_closed_form(int N, double beta, double r, double rho);

// Adaptive polar-angle quadrature (the production path for N=2,4 and the
// oracle for N=1,3). The integrable theta->0 endpoint behaviour is split off
// analytically so near-diagonal pairs stay accurate.
double angular_kernel_quadrature(int N, double beta, double r, double rho,
                                 double rel_tol = 1e-13);

// Production dispatcher: closed forms where available, quadrature otherwise.
// Requires r,rho > 0, r != rho, 0 < beta < 2, N in {1,2,3,4}.
double angular_kernel(int N, double beta, double r, double rho);

// Coefficient of the diagonal singularity:
//   K(r,rho) ~ A_N(beta) (r rho)^{-(N-1)/2} |r-rho|^{-(1+beta)},  rho -> r.
// A_1 = 1; for N >= 2, A_N = |S^{N-2}| B((N-1)/2, (1+beta)/2) / 2.
double diag_singular_coefficient(int N, double beta);

// Frozen-slope near-diagonal cell rules. The singular factor
// |r-rho|^{gamma-1-beta} (beta = gamma*s) is integrated analytically.
struct NearDiagonalRule {
  double gamma = 0.0;
  double beta = 0.0;
  // \int\int_{[a,b]^2} |r-rho|^{gamma-1-beta} dr drho
  double diag_mass = 0.0;
  double contribution(double slope) const;
};
NearDiagonalRule near_diagonal_weights(double a, double b, double beta,
                                       double gamma);

// \int_0^{dr}\int_0^{dl} |mr x + ml y|^gamma (x+y)^{-(1+beta)} dy dx :
// the corner piece of two adjacent cells with frozen slopes ml (left of the
// shared node) and mr (right of it).
double adjacent_cells_contribution(double dl, double dr, double beta,
                                   double gamma, double slope_l,
                                   double slope_r);

// Shared per-(N,beta) kernel state: the one-argument ratio profile
// kt(w) = K(1,w), its diagonal coefficient, and cached tail constants.
// Immutable after construction; safe for concurrent readers.
class KernelContext {
 public:
  KernelContext(int N, double beta);

  int N() const { return N_; }
  double beta() const { return beta_; }
  double sphere() const { return sphere_; }
  double diag_coef() const { return A_; }
  // (N+beta)(beta+2)/(2N): K(1,w) = |S^{N-1}| w^{-(N+beta)} (1 + c2/w^2 + ...)
  double far_c2() const { return c2_; }

  // K(1,w) for w > 1.
  double kappa_ratio(double w) const;
  // K(r,rho) for r,rho > 0, r != rho (either may be 0).
  double kernel(double r, double rho) const;
  // K(1,w) - A_N w^{-(N-1)/2} (w-1)^{-(1+beta)}: the remainder after the
  // diagonal model, evaluated stably.
  double ratio_remainder(double w) const;

  // Y(gamma,kappa) = |S^{N-1}| \int_1^inf |1-w^{-kappa}|^gamma w^{N-1} K(1,w) dw.
  // Building block of the exact tail-tail closed form; cached.
  double tail_Y(double gamma, double kappa) const;

  // Registry keyed by (N, beta); contexts are never evicted.
  static std::shared_ptr<const KernelContext> get(int N, double beta);

 private:
  int N_;
  double beta_;
  double sphere_;
  double A_;
  double c2_;
  // log of the normalized ratio profile on zeta = (w-1)/(w+1), N=2,4 only
  std::vector<double> spline_y_, spline_m_;
  double spline_h_ = 0.0;

  mutable std::mutex y_mutex_;
  mutable std::map<std::pair<double, double>, double> y_cache_;

  double kappa_ratio_exact(double w) const;
  void build_spline();
};

// \int_X^inf |a - c rho^{-kappa}|^gamma rho^{-(1+e)} drho, the analytic
// power-tail block (binomial series away from the sign change, quadrature
// across it). Requires e > 0; a, c >= 0.
double power_tail_integral(double a, double c, double kappa, double gamma,
                           double e, double X);
// Signed variant \int |a - v|^{g} sgn(a - v) rho^{-(1+e)} drho with
// v = c rho^{-kappa} (used by gradients, g = gamma-1, and by the pointwise
// operator, g = p-1).
double power_tail_integral_signed(double a, double c, double kappa, double g,
                                  double e, double X);

}  // namespace fhslab
