#include "fhslab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fhslab/isotonic.hpp"

namespace fhslab {

namespace {

std::vector<double> projection_weights(const Grid& grid, int N) {
  const auto& x = grid.nodes();
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double cell = 0.0;
    if (j > 0) cell += 0.5 * (x[j] - x[j - 1]);
    if (j + 1 < x.size()) cell += 0.5 * (x[j + 1] - x[j]);
    const double r_eff = std::max(x[j], 0.5 * x[1]);
    w[j] = cell * std::pow(r_eff, N - 1.0);
  }
  return w;
}

RadialProfile initial_profile(const ProblemParams& pp, const Grid& grid,
                              const OptimizerOptions& opt) {
  if (opt.init == "extremal-guess") return candidate_extremal(pp, grid);
  if (opt.init == "gaussian-like") {
    std::vector<double> v(grid.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = grid.node(i);
      v[i] = std::exp(-r * r);
    }
    return RadialProfile(grid, std::move(v), pp.decay_exp);
  }
  if (opt.init == "random") {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    std::vector<double> v(grid.node_count());
    for (auto& t : v) t = uni(rng);
    // random positive noise, then shape it into the feasible class
    auto w = projection_weights(grid, pp.N);
    v = monotone_projection(v, w);
    // impose a decaying envelope so the weighted norm is finite
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = grid.node(i);
      v[i] *= std::pow(1.0 + r * r, -pp.decay_exp / 2.0);
    }
    v = monotone_projection(v, w);
    return RadialProfile(grid, std::move(v), pp.decay_exp);
  }
  throw std::invalid_argument("unknown optimizer init: " + opt.init);
}

double weighted_l2(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

std::vector<double> discrete_gradient(const RadialProfile& u,
                                      const ProblemParams& pp,
                                      const EngineOptions& opt) {
  return gagliardo_energy_gradient(u, pp.N, pp.s, pp.p, opt);
}

RadialProfile normalize_profile(const RadialProfile& u, const ProblemParams& pp) {
  const double r_half = u.half_height_radius();
  RadialProfile v = dilate_scale(u, 1.0, r_half);
  const double nrm = weighted_norm(v, pp.N, pp.alpha, pp.q);
  if (!(nrm > 0.0) || std::isinf(nrm))
    throw std::invalid_argument("profile cannot be normalized");
  std::vector<double> vals = v.values;
  for (auto& t : vals) t /= nrm;
  return v.with_values(std::move(vals));
}

MinimizerResult minimize(const ProblemParams& pp, const Grid& grid,
                         const OptimizerOptions& opt,
                         const std::optional<RadialProfile>& start) {
  if (!pp.minimization_mode())
    throw ParamError("minimization needs alpha < p*s (q > p)");

  const double target_norm = std::pow(opt.lambda, 1.0 / pp.q);
  const auto pw = projection_weights(grid, pp.N);

  RadialProfile u = start ? *start : initial_profile(pp, grid, opt);
  if (!(u.grid == grid)) u = u.resampled(grid);

  const auto renormalize = [&](RadialProfile& prof) {
    const double nrm = weighted_norm(prof, pp.N, pp.alpha, pp.q);
    if (!(nrm > 0.0) || std::isinf(nrm))
      throw std::runtime_error("optimizer lost feasibility (zero or divergent norm)");
    std::vector<double> vals = prof.values;
    const double fac = target_norm / nrm;
    for (auto& t : vals) t *= fac;
    prof = prof.with_values(std::move(vals));
  };

  {
    std::vector<double> vals = monotone_projection(u.values, pw);
    u = u.with_values(std::move(vals));
    renormalize(u);
  }

  const double norm_p = std::pow(target_norm, pp.p);
  double E = gagliardo_energy(u, pp.N, pp.s, pp.p, opt.engine);
  double R = E / norm_p;

  MinimizerResult res;
  res.normalization = "weighted norm fixed to lambda^{1/q}; dilation pinned "
                      "u(1) = u(0)/2 every " + std::to_string(opt.pin_every) +
                      " iterations";

  std::vector<double> g = discrete_gradient(u, pp, opt.engine);
  double gmax = 1e-300;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  double step = 0.1 * u.values.front() / gmax;

  std::vector<double> prev_vals, prev_grad;
  std::vector<double> window_R;
  double best_recorded = R;
  res.trace.push_back({0, R, 0.0, 0.0});

  int it = 1;
  for (; it <= opt.max_iter; ++it) {
    bool accepted = false;
    double proj_dist = 0.0;
    RadialProfile cand = u;
    double E_new = E, R_new = R, used_step = step;

    for (int bt = 0; bt < 48 && !accepted; ++bt) {
      std::vector<double> vals(u.values.size());
      for (std::size_t j = 0; j < vals.size(); ++j)
        vals[j] = std::max(u.values[j] - used_step * g[j], 0.0);
      std::vector<double> proj = monotone_projection(vals, pw);
      proj_dist = weighted_l2(vals, proj, pw);
      RadialProfile trial = u.with_values(std::move(proj));
      double nrm = weighted_norm(trial, pp.N, pp.alpha, pp.q);
      if (!(nrm > 0.0) || std::isinf(nrm)) {
        used_step *= 0.5;
        continue;
      }
      {
        std::vector<double> tv = trial.values;
        const double fac = target_norm / nrm;
        for (auto& t : tv) t *= fac;
        trial = trial.with_values(std::move(tv));
      }
      const double E_t = gagliardo_energy(trial, pp.N, pp.s, pp.p, opt.engine);
      const double R_t = E_t / norm_p;
      if (R_t < R) {
        cand = std::move(trial);
        E_new = E_t;
        R_new = R_t;
        accepted = true;
      } else {
        used_step *= 0.5;
      }
    }
    if (!accepted) break;  // no descent direction at machine scale

    // Barzilai-Borwein step from consecutive gradients
    std::vector<double> g_new = discrete_gradient(cand, pp, opt.engine);
    if (!prev_vals.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t j = 0; j < g_new.size(); ++j) {
        const double sj = cand.values[j] - u.values[j];
        const double yj = g_new[j] - g[j];
        sy += sj * yj;
        yy += yj * yj;
      }
      if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, used_step * 0.1, used_step * 64.0);
      else step = used_step * 2.0;
    } else {
      step = used_step * 2.0;
    }
    prev_vals = u.values;
    prev_grad = g;
    u = std::move(cand);
    E = E_new;
    R = R_new;
    g = std::move(g_new);

    if (R < best_recorded) {
      res.trace.push_back({it, R, used_step, proj_dist});
      best_recorded = R;
    }

    // dilation pin against concentration/spreading drift
    if (opt.pin_every > 0 && it % opt.pin_every == 0 && u.values.front() > 0.0) {
      const double r_half = u.half_height_radius();
      if (std::abs(std::log(r_half)) > 1e-3) {
        RadialProfile pinned = dilate_scale(u, 1.0, r_half);
        renormalize(pinned);
        const double E_p2 = gagliardo_energy(pinned, pp.N, pp.s, pp.p, opt.engine);
        u = std::move(pinned);
        E = E_p2;
        R = E / norm_p;
        g = discrete_gradient(u, pp, opt.engine);
        prev_vals.clear();
      }
    }

    window_R.push_back(R);
    if (static_cast<int>(window_R.size()) > opt.window_iters) {
      const double R_old = window_R[window_R.size() - opt.window_iters - 1];
      if (std::abs(R_old - R) <= opt.tol * std::abs(R_old)) {
        res.converged = true;
        break;
      }
    }
  }

  renormalize(u);
  res.profile = u;
  res.I1_estimate = gagliardo_energy(u, pp.N, pp.s, pp.p, opt.engine);
  res.iterations = std::min(it, opt.max_iter);
  const double R_fin = res.I1_estimate / norm_p;
  if (res.trace.empty() || R_fin < res.trace.back().rayleigh)
    res.trace.push_back({res.iterations, R_fin, step, 0.0});
  return res;
}

}  // namespace fhslab
