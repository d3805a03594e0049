// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_MIMO_HPP
#define PASSFL_MIMO_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "passfl/channel.hpp"
#include "passfl/solver.hpp"

namespace passfl {

struct mimo_solve_result {
  transceiver_state state;       // positions unused; schedule, b, rho active
  std::vector<cplx> combiner;    // unit-norm receive combiner f
  std::vector<cplx> effective_channels;  // g_k = f^H h_k
  double effective_noise = 0.0;          // sigma^2 ||f||^2 (= sigma^2, unit f)
  aircomp_metrics metrics;
  solve_trace trace;
};

namespace detail {

/// Receive combiner minimizing || rho f^H H Gamma B - phi^T Gamma ||^2
/// + sigma^2 rho^2 ||f||^2. The problem depends on f and rho only through
/// u = rho f, so the minimizer is computed in u via a regularized
/// Hermitian solve and returned normalized to unit length.
inline std::vector<cplx> mmse_combiner(
    const std::vector<std::vector<cplx>>& columns,
    const transceiver_state& st, const std::vector<double>& phi,
    double sigma2) {
  const int m = static_cast<int>(columns.empty() ? 0 : columns[0].size());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(m, m);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (!st.schedule[k]) continue;
    Eigen::VectorXcd t(m);
    for (int i = 0; i < m; ++i) t(i) = columns[k][i] * st.power_scalings[k];
    gram.noalias() += t * t.adjoint();
    rhs.noalias() += t * phi[k];
  }
  gram.diagonal().array() += sigma2;
  Eigen::VectorXcd u = gram.ldlt().solve(rhs);
  double norm = u.norm();
  if (!(norm > 0.0)) {
    // degenerate (all-zero scalings): fall back to a uniform combiner
    u = Eigen::VectorXcd::Constant(m, cplx{1.0, 0.0});
    norm = u.norm();
  }
  std::vector<cplx> f(m);
  for (int i = 0; i < m; ++i) f[i] = u(i) / norm;
  return f;
}

inline std::vector<cplx> effective_channels(
    const std::vector<std::vector<cplx>>& columns,
    const std::vector<cplx>& f) {
  std::vector<cplx> g(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i)
      acc += std::conj(f[i]) * columns[k][i];
    g[k] = acc;
  }
  return g;
}

/// SNR as a function of the receive scale for fixed combiner and scalings.
inline double snr_at_rho(const std::vector<cplx>& g,
                         const transceiver_state& st,
                         const std::vector<double>& phi, double sigma2,
                         double rho) {
  double sig = 0.0, mis = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!st.schedule[k]) continue;
    cplx e = rho * g[k] * st.power_scalings[k];
    sig += std::norm(e);
    mis += std::norm(e - phi[k]);
  }
  double noise = rho * rho * sigma2;
  return (sig + noise) / (mis + noise);
}

/// Energy for fixed scalings is proportional to 1 / log2(SNR), so the
/// energy-optimal receive scale is the SNR maximizer. A closed-form
/// candidate seeds a log-spaced 1-D search with local refinement.
inline double energy_optimal_rho(const std::vector<cplx>& g,
                                 const transceiver_state& st,
                                 const std::vector<double>& phi,
                                 double sigma2) {
  double cross = 0.0, norm_phi2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!st.schedule[k]) continue;
    cross += (std::conj(g[k] * st.power_scalings[k]) * phi[k]).real();
    norm_phi2 += phi[k] * phi[k];
  }
  double seed = cross > 0.0 ? norm_phi2 / cross : 1.0;
  double best_rho = seed, best = snr_at_rho(g, st, phi, sigma2, seed);
  auto consider = [&](double rho) {
    if (!(rho > 0.0)) return;
    double s = snr_at_rho(g, st, phi, sigma2, rho);
    if (s > best) {
      best = s;
      best_rho = rho;
    }
  };
  for (int pass = 0; pass < 3; ++pass) {
    double span = pass == 0 ? 100.0 : 1.3;
    double lo = best_rho / span, hi = best_rho * span;
    double step = std::pow(hi / lo, 1.0 / 200.0);
    double x = lo;
    for (int i = 0; i <= 200; ++i, x *= step) consider(x);
  }
  return best_rho;
}

}  // namespace detail

/// Baseline optimizer for a fixed receive array: the placement step of the
/// joint scheme is replaced by a combiner update plus a receive-scale
/// search, and scheduling / power scaling run on the effective scalar
/// channels g_k = f^H h_k with noise sigma^2 ||f||^2.
inline mimo_solve_result optimize_mimo_baseline(const scenario& sc,
                                                const system_params& p,
                                                const mimo_array& arr,
                                                const solver_config& cfg) {
  const int num = static_cast<int>(sc.devices.size());
  if (num < cfg.k_min)
    throw error("optimize_mimo_baseline: fewer devices than k_min");
  std::vector<double> phi(num);
  for (int i = 0; i < num; ++i) phi[i] = sc.devices[i].weight;
  const auto columns = mimo_channel_matrix(p, arr, sc.devices);

  solve_trace trace;
  transceiver_state cur;
  cur.schedule.assign(num, 1);
  cur.power_scalings.assign(num, cplx{std::sqrt(p.power_cap), 0.0});
  std::vector<cplx> f =
      detail::mmse_combiner(columns, cur, phi, p.noise_power);
  std::vector<cplx> g = detail::effective_channels(columns, f);
  cur.receive_scale = detail::energy_optimal_rho(g, cur, phi, p.noise_power);

  std::optional<aircomp_metrics> cur_metrics =
      detail::try_metrics(g, cur, phi, p);
  if (cur_metrics) trace.outer_energy.push_back(cur_metrics->total_energy);

  std::vector<cplx> best_f = f, best_g = g;
  for (int iter = 0; iter < cfg.outer_iters; ++iter) {
    transceiver_state cand = cur;
    std::vector<cplx> cand_f = f, cand_g = g;

    try {
      auto selected =
          schedule_devices(cand_g, cand.power_scalings, cand.receive_scale,
                           phi, p.noise_power, cfg.k_min);
      std::fill(cand.schedule.begin(), cand.schedule.end(), 0);
      for (int k : selected) cand.schedule[k] = 1;
    } catch (const infeasible_error&) {
      if (cur_metrics) throw;
    }
    trace.schedule_history.push_back(cand.schedule);

    cand_f = detail::mmse_combiner(columns, cand, phi, p.noise_power);
    cand_g = detail::effective_channels(columns, cand_f);
    cand.receive_scale =
        detail::energy_optimal_rho(cand_g, cand, phi, p.noise_power);

    try {
      auto preport = tune_power(cand, cand_g, phi, p.noise_power,
                                p.power_cap, cfg);
      trace.alg2_etas.push_back(preport.etas);
      trace.alg2_objectives.push_back(preport.objectives);
      trace.fallback_events += preport.fallback_events;
    } catch (const infeasible_error&) {
      if (cur_metrics) break;
      throw;
    }

    auto m = detail::try_metrics(cand_g, cand, phi, p);
    if (!m) {
      if (cur_metrics) break;
      throw infeasible_error("infeasible start");
    }
    if (cur_metrics &&
        m->total_energy > cur_metrics->total_energy * (1.0 + 1e-12))
      break;

    bool converged =
        cur_metrics && std::abs(m->total_energy - cur_metrics->total_energy) <=
                           cfg.tolerance * cur_metrics->total_energy;
    cur = cand;
    f = cand_f;
    g = cand_g;
    best_f = f;
    best_g = g;
    cur_metrics = m;
    trace.outer_energy.push_back(m->total_energy);
    if (converged) break;
  }

  if (!cur_metrics) throw infeasible_error("infeasible start");
  mimo_solve_result out;
  out.state = cur;
  out.combiner = best_f;
  out.effective_channels = best_g;
  double fn2 = 0.0;
  for (const auto& c : best_f) fn2 += std::norm(c);
  out.effective_noise = p.noise_power * fn2;
  out.metrics = *cur_metrics;
  out.trace = trace;
  return out;
}

}  // namespace passfl

#endif  // PASSFL_MIMO_HPP
