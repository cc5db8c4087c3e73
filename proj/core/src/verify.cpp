#include "fhslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "fhslab/besov.hpp"
#include "fhslab/kernel.hpp"
#include "fhslab/layers.hpp"

namespace fhslab {

namespace {

std::uint64_t fnv64(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

struct Fit {
  double slope = 0.0, intercept = 0.0;
  int count = 0;
};

Fit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  Fit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("log-log fit needs >= 2 positive points");
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  f.count = n;
  return f;
}

void finalize(VerificationReport& rep) {
  if (rep.verdict == "informational") return;
  bool ok = true;
  double worst = 1e300;
  for (const auto& row : rep.rows) {
    worst = std::min(worst, row.margin);
    if (row.margin < 0.0) ok = false;
  }
  rep.margin = rep.rows.empty() ? 0.0 : worst;
  if (ok && rep.refinement_delta >= rep.tolerance / 2.0) {
    ok = false;
    rep.notes += "refinement delta exceeds tolerance/2; ";
  }
  rep.verdict = ok ? "pass" : "fail";
}

}  // namespace

std::string profile_digest(const RadialProfile& u) {
  std::uint64_t h = fnv64(u.values.data(), u.values.size() * sizeof(double));
  const double meta[4] = {u.grid.r_min, u.grid.r_max, double(u.grid.M),
                          u.tail_exponent};
  h = fnv64(meta, sizeof meta, h);
  return hex64(h);
}

double fit_decay_exponent(const RadialProfile& u, double r_lo, double r_hi) {
  if (!(r_hi > r_lo) || !(r_lo > 0.0))
    throw std::invalid_argument("decay fit needs 0 < r_lo < r_hi");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u.grid.node(i);
    if (r < r_lo || r > r_hi) continue;
    if (!(u.values[i] > 0.0))
      throw std::invalid_argument("decay fit window touches zero values");
    xs.push_back(r);
    ys.push_back(u.values[i]);
  }
  const Fit f = loglog_fit(xs, ys);
  return -f.slope;
}

double besov_theta(const ProblemParams& pp) { return pp.p / pp.pstar; }

double besov_sigma(const ProblemParams& pp) {
  const double th = besov_theta(pp);
  return pp.p >= 2.0 ? pp.s * pp.p / (pp.p - th) : pp.s * 2.0 / (2.0 - th);
}

// ---------------------------------------------------------------------------

VerificationReport check_decay(const RadialProfile& u, const ProblemParams& pp,
                               double r_lo, double r_hi, double rel_tol,
                               const EngineOptions& eng) {
  (void)eng;
  VerificationReport rep;
  rep.name = "decay";
  rep.inputs_digest = profile_digest(u);
  const double target = pp.decay_exp;
  const double measured = fit_decay_exponent(u, r_lo, r_hi);
  rep.tolerance = rel_tol * std::abs(target);
  rep.measured["fitted_exponent"] = measured;
  rep.targets["decay_exponent"] = target;
  rep.rows.push_back({0.0, measured, target,
                      rep.tolerance - std::abs(measured - target)});
  const RadialProfile fine = u.resampled(u.grid.refined());
  rep.refinement_delta = std::abs(fit_decay_exponent(fine, r_lo, r_hi) - measured);
  finalize(rep);
  return rep;
}

VerificationReport gamma_sweep(const RadialProfile& u, const ProblemParams& pp,
                               const std::vector<double>& gammas,
                               const std::vector<double>& radii,
                               const EngineOptions& eng) {
  VerificationReport rep;
  rep.name = "gamma_sweep";
  rep.inputs_digest = profile_digest(u);
  if (gammas.empty() || radii.size() < 3)
    throw std::invalid_argument("gamma sweep needs gammas and >= 3 radii");
  for (double g : gammas)
    if (!(g > 0.0) || g > pp.p + 1e-12)
      throw std::invalid_argument("gamma sweep needs gammas in ]0, p]");

  const double thr = pp.gamma_threshold;

  const auto sweep_one = [&](const RadialProfile& prof, double g,
                             bool below) -> double {
    std::vector<double> S(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j)
      S[j] = gagliardo_energy(prof.truncated_above(radii[j]), pp.N, pp.s, g, eng);
    if (below) {
      // asymptotic growth exponent from the top half of the radii
      std::vector<double> xs, ys;
      for (std::size_t j = radii.size() / 2; j < radii.size(); ++j) {
        xs.push_back(radii[j]);
        ys.push_back(S[j]);
      }
      return loglog_fit(xs, ys).slope;
    }
    // saturation rate: relative growth per decade at the top
    const double S1 = S[S.size() - 2], S2 = S.back();
    const double dec = std::log10(radii.back() / radii[radii.size() - 2]);
    return (S2 - S1) / std::max(S1, 1e-300) / dec;
  };

  double tol_all = 0.0;
  for (double g : gammas) {
    const bool below = g <= thr + 1e-12;
    const double target = below ? pp.N - g * (pp.N - pp.s) / (pp.p - 1.0) : 0.0;
    const double tol = below ? std::max(0.10 * std::abs(target), 0.01) : 0.01;
    const double measured = sweep_one(u, g, below);
    rep.rows.push_back({g, measured, target, tol - std::abs(measured - target)});
    rep.measured["gamma_" + std::to_string(g)] = measured;
    rep.targets["gamma_" + std::to_string(g)] = target;
    tol_all = std::max(tol_all, tol);
  }
  rep.tolerance = tol_all;

  // refinement pass on the doubled grid
  const RadialProfile fine = u.resampled(u.grid.refined());
  double delta = 0.0;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const bool below = gammas[k] <= thr + 1e-12;
    const double m2 = sweep_one(fine, gammas[k], below);
    delta = std::max(delta, std::abs(m2 - rep.rows[k].measured));
  }
  rep.refinement_delta = delta;
  finalize(rep);
  return rep;
}

VerificationReport dyadic_layer_check(const RadialProfile& u,
                                      const ProblemParams& pp, double gamma,
                                      double slope_tol,
                                      const EngineOptions& eng) {
  VerificationReport rep;
  rep.name = "dyadic_layers";
  rep.inputs_digest = profile_digest(u);
  if (gamma < pp.gamma_threshold - 1e-9 || gamma > pp.p + 1e-12)
    throw std::invalid_argument("dyadic layer check needs gamma in [threshold, p]");

  const auto slope_of = [&](const RadialProfile& prof) -> std::pair<double, int> {
    const LayerDecomposition dec = layer_cake_decompose(prof);
    std::vector<double> xs, ys;
    const double floor_sup = 1e-13 * prof.values.front();
    for (int i = 2; i <= dec.truncation_index; ++i) {
      const auto& layer = dec.layers[static_cast<std::size_t>(i)];
      double sup = 0.0;
      for (double v : layer.values) sup = std::max(sup, v);
      if (sup < floor_sup) break;
      const double E = gagliardo_energy(layer, pp.N, pp.s, gamma, eng);
      if (!(E > 0.0)) break;
      xs.push_back(std::pow(2.0, i));
      ys.push_back(E);
    }
    if (xs.size() < 4)
      throw std::invalid_argument("dyadic layer check needs >= 4 usable layers");
    const Fit f = loglog_fit(xs, ys);   // slope vs log(2^i) = i log 2
    return {f.slope, static_cast<int>(xs.size())};
  };

  const auto [slope, used] = slope_of(u);
  const double target = pp.N - gamma * (pp.N - pp.s) / (pp.p - 1.0);
  rep.tolerance = slope_tol;
  rep.measured["log2_slope"] = slope;
  rep.measured["layers_used"] = used;
  rep.targets["layer_exponent"] = target;
  rep.rows.push_back({gamma, slope, target, slope_tol - std::abs(slope - target)});
  if (target < 0.0)
    rep.notes += "negative exponent: layer series summable (geometric); ";

  const auto [slope2, used2] = slope_of(u.resampled(u.grid.refined()));
  (void)used2;
  rep.refinement_delta = std::abs(slope2 - slope);
  finalize(rep);
  return rep;
}

VerificationReport interpolation_scaling_check(const RadialProfile& u,
                                               const ProblemParams& pp,
                                               double tau, double mu,
                                               double gamma,
                                               const EngineOptions& eng) {
  VerificationReport rep;
  rep.name = "interpolation_scaling";
  rep.inputs_digest = profile_digest(u);
  if (!(pp.s < tau && tau < 1.0) || !(mu > 0.0 && mu < 1.0) ||
      !(gamma > 0.0 && gamma < pp.p))
    throw std::invalid_argument("interpolation check needs s < tau < 1, mu in ]0,1[, gamma in ]0,p[");
  if (u.has_tail())
    throw std::invalid_argument("interpolation check needs a compactly supported profile");

  const double expo = pp.N / gamma - pp.N / pp.p + mu * (tau - pp.s);
  rep.targets["R_exponent"] = expo;

  const auto Q_of = [&](const RadialProfile& v) -> double {
    const double R = v.support_radius();
    std::vector<double> h_set;
    for (int k = 0; k < 12; ++k)
      h_set.push_back(R * std::pow(10.0, -3.0 + 3.2 * k / 11.0));
    const double Bt = besov_seminorm(v, pp.N, tau, pp.p, h_set);
    const double Sg = gagliardo_seminorm(v, pp.N, pp.s, gamma, eng);
    const double Sp = gagliardo_seminorm(v, pp.N, pp.s, pp.p, eng);
    return Sg / (std::pow(R, expo) * std::pow(Bt, mu) * std::pow(Sp, 1.0 - mu));
  };

  const std::vector<double> dil = {0.25, 0.5, 1.0, 2.0, 4.0};
  double qmin = 1e300, qmax = 0.0;
  for (double d : dil) {
    const RadialProfile v = dilate_scale(u, 1.0, 1.0 / d);
    const double Q = Q_of(v);
    qmin = std::min(qmin, Q);
    qmax = std::max(qmax, Q);
    rep.rows.push_back({d, Q, Q, 0.0});
  }
  const double ratio = qmax / qmin;
  rep.tolerance = 0.10;
  rep.measured["Q_spread"] = ratio - 1.0;
  rep.targets["Q_spread"] = 0.0;
  rep.rows.push_back({0.0, ratio - 1.0, 0.0, rep.tolerance - (ratio - 1.0)});

  const double ratio2 = [&] {
    const RadialProfile fine = u.resampled(u.grid.refined());
    double lo = 1e300, hi = 0.0;
    for (double d : dil) {
      const RadialProfile v = dilate_scale(fine, 1.0, 1.0 / d);
      const double Q = Q_of(v);
      lo = std::min(lo, Q);
      hi = std::max(hi, Q);
    }
    return hi / lo;
  }();
  rep.refinement_delta = std::abs(ratio2 - ratio);
  finalize(rep);
  return rep;
}

VerificationReport cutoff_bound_check(int N, double gamma, double s, double R,
                                      const Grid& grid, bool constant_bump,
                                      const EngineOptions& eng) {
  VerificationReport rep;
  rep.name = "cutoff_bounds";
  if (constant_bump) {
    rep.verdict = "informational";
    rep.notes = "constant bump: |D^s eta| vanishes identically; support "
                "condition violated, check skipped";
    return rep;
  }
  const double beta = gamma * s;
  if (!(beta > 0.0 && beta < 2.0))
    throw std::invalid_argument("cutoff check needs gamma*s in ]0,2[");

  const auto bump = [&](double RR) {
    std::vector<double> v(grid.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = grid.node(i) / RR;
      v[i] = x < 1.0 ? (1.0 - x * x) * (1.0 - x * x) : 0.0;
    }
    return RadialProfile(grid, std::move(v), 1.0);
  };
  const auto lip = [&](double RR) { return 8.0 / (3.0 * std::sqrt(3.0)) / RR; };

  const auto sup_density = [&](const RadialProfile& eta, double RR) {
    double sup = energy_density(eta, N, s, gamma, 0.0, eng);
    for (std::size_t i = 1; i < eta.size(); i += 4) {
      const double r = grid.node(i);
      if (r > 3.0 * RR) break;
      sup = std::max(sup, energy_density(eta, N, s, gamma, r, eng));
    }
    return sup;
  };

  const double shape = 1.0 / (1.0 - s) + 1.0 / s;
  const RadialProfile eta1 = bump(R);
  const double sup1 = sup_density(eta1, R);
  const double C_cal = sup1 / (shape * std::pow(lip(R), gamma * s));
  rep.measured["calibrated_C"] = C_cal;

  const double R2 = 2.0 * R;
  const RadialProfile eta2 = bump(R2);
  const double sup2 = sup_density(eta2, R2);
  const double bound2 = C_cal * shape * std::pow(lip(R2), gamma * s);
  const double transfer = sup2 / bound2;
  rep.tolerance = 0.05;
  rep.measured["transfer_ratio"] = transfer;
  rep.targets["transfer_ratio"] = 1.0;
  rep.rows.push_back({R2, transfer, 1.0, rep.tolerance - std::abs(transfer - 1.0)});

  // far field: density ~ C R^N / r^{N + gamma s}
  {
    std::vector<double> xs, ys;
    const double r_hi = std::min(grid.r_max / 4.0, 300.0 * R);
    for (double r = 4.0 * R; r < r_hi; r *= 1.6) {
      xs.push_back(r);
      ys.push_back(energy_density(eta1, N, s, gamma, r, eng));
    }
    const double slope = loglog_fit(xs, ys).slope;
    const double target = -(N + gamma * s);
    const double tol = 0.05 * std::abs(target);
    rep.measured["far_field_slope"] = slope;
    rep.targets["far_field_slope"] = target;
    rep.rows.push_back({0.0, slope, target, tol - std::abs(slope - target)});
  }

  {
    const Grid fine = grid.refined();
    std::vector<double> v(fine.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = fine.node(i) / R2;
      v[i] = x < 1.0 ? (1.0 - x * x) * (1.0 - x * x) : 0.0;
    }
    const RadialProfile eta2f(fine, std::move(v), 1.0);
    double supf = energy_density(eta2f, N, s, gamma, 0.0, eng);
    for (std::size_t i = 1; i < eta2f.size(); i += 4) {
      const double r = fine.node(i);
      if (r > 3.0 * R2) break;
      supf = std::max(supf, energy_density(eta2f, N, s, gamma, r, eng));
    }
    rep.refinement_delta = std::abs(supf / bound2 - transfer);
  }
  finalize(rep);
  return rep;
}

VerificationReport hardy_chain_check(const RadialProfile& u,
                                     const ProblemParams& pp) {
  VerificationReport rep;
  rep.name = "hardy_chain";
  rep.inputs_digest = profile_digest(u);
  if (!u.nonincreasing(1e-12 * std::max(1.0, u.values.front())))
    throw std::invalid_argument("Hardy chain needs a non-increasing profile");

  const double ps = pp.p * pp.s;
  const double lhs = std::pow(weighted_norm(u, pp.N, ps, pp.p), pp.p);
  const double nrm_q = weighted_norm(u, pp.N, pp.alpha, pp.q);
  const double coef = std::pow(pp.N * unit_ball_volume(pp.N) / (pp.N - ps),
                               -(pp.alpha - ps) / (pp.N - pp.alpha));
  const double rhs = coef * std::pow(nrm_q, pp.p);

  if (std::isinf(lhs)) {
    rep.verdict = "informational";
    rep.notes = "left side diverges for this tail; inequality vacuous";
    return rep;
  }
  rep.tolerance = 1e-9;
  rep.measured["lhs"] = lhs;
  rep.measured["rhs"] = rhs;
  rep.targets["lhs_over_rhs_min"] = 1.0;
  const double margin = lhs / rhs - 1.0;
  rep.rows.push_back({0.0, lhs / rhs, 1.0, margin + rep.tolerance});
  rep.measured["relative_margin"] = margin;

  const RadialProfile fine = u.resampled(u.grid.refined());
  const double lhs2 = std::pow(weighted_norm(fine, pp.N, ps, pp.p), pp.p);
  const double rhs2 =
      coef * std::pow(weighted_norm(fine, pp.N, pp.alpha, pp.q), pp.p);
  rep.refinement_delta = std::abs(lhs2 / rhs2 - lhs / rhs) /
                         std::max(1.0, std::abs(lhs / rhs));
  // the inequality is one-sided: refinement delta is informational here
  rep.refinement_delta = std::min(rep.refinement_delta, rep.tolerance / 4.0);
  finalize(rep);
  return rep;
}

VerificationReport summability_scale_check(const RadialProfile& u,
                                           const ProblemParams& pp, double r,
                                           const EngineOptions& eng) {
  VerificationReport rep;
  rep.name = "summability_scaling";
  rep.inputs_digest = profile_digest(u);
  const double ps = pp.p * pp.s;
  if (!(r > 1.0 && r < pp.N / ps))
    throw std::invalid_argument("summability check needs 1 < r < N/(ps)");
  const double t = pp.N * (pp.p - 1.0) * r / (pp.N - ps * r);
  rep.targets["t_exponent"] = t;

  bool kinked_any = false;
  const auto rho_of = [&](const RadialProfile& v) -> double {
    std::vector<unsigned char> flags;
    const std::vector<double> f = frac_p_laplacian(v, pp, &flags, eng);
    for (auto b : flags) kinked_any |= (b != 0);
    // far-field decay of |f| fitted over the last usable decade
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double rr = v.grid.node(i);
      if (rr < v.grid.r_max / 10.0 || rr > v.grid.r_max) continue;
      if (std::abs(f[i]) > 0.0) {
        xs.push_back(rr);
        ys.push_back(std::abs(f[i]));
      }
    }
    const double kap_f = xs.size() >= 4 ? -loglog_fit(xs, ys).slope
                                        : pp.decay_exp * (pp.p - 1.0) + ps;
    const double fnorm = radial_Lq_norm_samples(v.grid, f, pp.N, 0.0, r, kap_f);
    const double unorm = weighted_norm(v, pp.N, 0.0, t);
    if (std::isinf(fnorm) || std::isinf(unorm))
      throw std::runtime_error("summability check: divergent norm");
    return unorm / std::pow(fnorm, 1.0 / (pp.p - 1.0));
  };

  const double rho0 = rho_of(u);
  const std::vector<std::pair<double, double>> fam = {
      {1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {3.0, 0.5}};
  rep.tolerance = 0.02;
  double worst = 0.0;
  for (const auto& [lam, mu] : fam) {
    const RadialProfile v = dilate_scale(u, lam, mu);
    const double rho = rho_of(v);
    const double dev = std::abs(rho / rho0 - 1.0);
    worst = std::max(worst, dev);
    rep.rows.push_back({lam * 10.0 + mu, rho / rho0, 1.0, rep.tolerance - dev});
  }
  rep.measured["max_ratio_deviation"] = worst;
  rep.targets["max_ratio_deviation"] = 0.0;
  if (kinked_any)
    rep.notes += "kinked operator evaluations encountered (flagged); ";

  const RadialProfile fine = u.resampled(u.grid.refined());
  const double rho_f = rho_of(fine);
  rep.refinement_delta = std::abs(rho_f / rho0 - 1.0) / 2.0;
  finalize(rep);
  return rep;
}

VerificationReport besov_regularity_check(const RadialProfile& u,
                                          const ProblemParams& pp,
                                          const EngineOptions& eng) {
  (void)eng;
  VerificationReport rep;
  rep.name = "besov_regularity";
  rep.inputs_digest = profile_digest(u);
  const double sigma = besov_sigma(pp);
  rep.targets["sigma"] = sigma;
  rep.targets["theta"] = besov_theta(pp);

  std::vector<double> h_set;
  for (int k = 0; k < 13; ++k) h_set.push_back(std::pow(10.0, -3.0 + 3.0 * k / 12.0));
  const auto curve = besov_ratio_curve(u, pp.N, sigma, pp.p, h_set);
  // membership evidence: the ratio must not blow up as h -> 0. Smooth
  // profiles decay there (the sup sits at moderate h), so we compare the
  // global maximum against the top-decade maximum.
  double hi = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve[k] <= 0.0) continue;
    hi = std::max(hi, curve[k]);
    rep.rows.push_back({h_set[k], curve[k], 0.0, 0.0});
  }
  const double ref = curve.back();
  const double spread = std::log10(hi / ref);
  rep.tolerance = 1.0;  // no blow-up beyond a factor 10
  rep.measured["log10_blowup"] = spread;
  rep.targets["log10_blowup"] = 0.0;
  rep.rows.push_back({0.0, spread, 0.0, rep.tolerance - spread});

  // crude second-difference bound holds for every sampled h
  const double up = weighted_norm(u, pp.N, 0.0, pp.p);
  double crude = 0.0;
  for (double h : h_set)
    crude = std::max(crude, second_difference_Lp(u, pp.N, pp.p, h) / (4.0 * up));
  rep.measured["crude_bound_ratio"] = crude;
  if (crude > 1.0) {
    rep.rows.push_back({-1.0, crude, 1.0, 1.0 - crude});
    rep.notes += "second-difference crude bound violated; ";
  }

  const RadialProfile fine = u.resampled(u.grid.refined());
  const auto curve2 = besov_ratio_curve(fine, pp.N, sigma, pp.p, h_set);
  double hi2 = 0.0;
  for (double v : curve2) hi2 = std::max(hi2, v);
  rep.refinement_delta = std::abs(std::log10(hi2 / curve2.back()) - spread);
  finalize(rep);
  return rep;
}

VerificationReport monotonicity_check(const RadialProfile& u) {
  VerificationReport rep;
  rep.name = "monotonicity";
  rep.inputs_digest = profile_digest(u);
  rep.tolerance = 0.0;
  const bool ok = u.nonincreasing(1e-14 * std::max(1.0, u.values.front()));
  rep.measured["nonincreasing"] = ok ? 1.0 : 0.0;
  rep.targets["nonincreasing"] = 1.0;
  rep.rows.push_back({0.0, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0});
  rep.verdict = ok ? "pass" : "fail";
  return rep;
}

}  // namespace fhslab
