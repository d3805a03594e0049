// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_METRICS_HPP
#define PASSFL_METRICS_HPP

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "passfl/channel.hpp"
#include "passfl/errors.hpp"
#include "passfl/rng.hpp"

namespace passfl {

/// Joint transmit/receive configuration: element positions, binary device
/// schedule, per-device complex power scalings and the real receive scale.
struct transceiver_state {
  std::vector<double> positions;       // element locations, ascending
  std::vector<int> schedule;           // gamma_k in {0,1}
  std::vector<cplx> power_scalings;    // b_k
  double receive_scale = 0.0;          // rho >= 0

  int num_devices() const { return static_cast<int>(schedule.size()); }

  std::vector<int> scheduled_indices() const {
    std::vector<int> s;
    for (int k = 0; k < num_devices(); ++k)
      if (schedule[k]) s.push_back(k);
    return s;
  }

  int scheduled_count() const {
    int c = 0;
    for (int g : schedule) c += g ? 1 : 0;
    return c;
  }
};

struct aircomp_metrics {
  double mse = 0.0;
  double snr = 0.0;
  double rate = 0.0;        // bits/s
  double time = 0.0;        // s per model entry
  std::vector<double> per_device_energy;  // J per entry
  double total_energy = 0.0;              // J per entry
};

namespace detail {

inline void check_dims(std::size_t h, std::size_t gamma, std::size_t b,
                       std::size_t phi) {
  if (h != gamma || h != b || h != phi)
    throw error("dimension mismatch between channel, schedule, scalings and weights");
}

/// Misalignment power: || rho h^T Gamma B - phi^T Gamma ||^2.
inline double misalignment(const std::vector<cplx>& h,
                           const transceiver_state& st,
                           const std::vector<double>& phi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!st.schedule[k]) continue;
    cplx d = st.receive_scale * h[k] * st.power_scalings[k] - phi[k];
    acc += std::norm(d);
  }
  return acc;
}

/// Received signal power: || rho h^T Gamma B ||^2.
inline double signal_power(const std::vector<cplx>& h,
                           const transceiver_state& st) {
  double acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!st.schedule[k]) continue;
    acc += std::norm(st.receive_scale * h[k] * st.power_scalings[k]);
  }
  return acc;
}

}  // namespace detail

/// Mean squared error between the scaled received signal and the target
/// weighted sum, for unit-variance independent symbols.
inline double aggregation_mse(const std::vector<cplx>& h,
                              const transceiver_state& st,
                              const std::vector<double>& phi, double sigma2) {
  detail::check_dims(h.size(), st.schedule.size(), st.power_scalings.size(),
                     phi.size());
  double rho = st.receive_scale;
  return detail::misalignment(h, st, phi) + sigma2 * rho * rho;
}

/// Ratio of received second moment to aggregation error.
inline double computation_snr(const std::vector<cplx>& h,
                              const transceiver_state& st,
                              const std::vector<double>& phi, double sigma2) {
  double eps = aggregation_mse(h, st, phi, sigma2);
  if (eps == 0.0) throw error("zero aggregation error (degenerate)");
  double rho = st.receive_scale;
  double second_moment = detail::signal_power(h, st) + rho * rho * sigma2;
  return second_moment / eps;
}

/// B * log2(snr); negative when snr < 1 (the caller decides feasibility).
inline double computation_rate(double snr, double bandwidth) {
  return bandwidth * std::log2(snr);
}

/// Seconds needed to convey one model entry at the target resolution.
inline double transmission_time(double resolution_bits, double rate) {
  if (rate <= 0.0)
    throw infeasible_error("infeasible: computation SNR <= 1");
  return resolution_bits / rate;
}

/// Per-device and total transmit energy for one entry: E_k = gamma_k |b_k|^2 t.
inline std::pair<std::vector<double>, double> round_energy(
    const transceiver_state& st, double time) {
  std::vector<double> e(st.schedule.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (st.schedule[k]) {
      e[k] = std::norm(st.power_scalings[k]) * time;
      total += e[k];
    }
  }
  return {std::move(e), total};
}

/// Noise-free weighted aggregate of the scheduled local statistics.
inline double ideal_aggregate(const std::vector<double>& phi,
                              const std::vector<int>& gamma,
                              const std::vector<double>& s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    if (gamma[k]) acc += phi[k] * s[k];
  return acc;
}

/// One noisy analog aggregation: rho * (sum_k h_k gamma_k b_k s_k + z) with
/// z drawn circularly-symmetric Gaussian from the given stream.
inline cplx noisy_aggregate(const std::vector<cplx>& h,
                            const transceiver_state& st,
                            const std::vector<double>& s, double sigma2,
                            rng& noise) {
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < h.size(); ++k)
    if (st.schedule[k]) acc += h[k] * st.power_scalings[k] * s[k];
  acc += noise.cgauss(sigma2);
  return st.receive_scale * acc;
}

/// Evaluates the full metric bundle for a state; throws when the
/// computation SNR does not exceed one (no finite transmission time).
inline aircomp_metrics compute_metrics(const std::vector<cplx>& h,
                                       const transceiver_state& st,
                                       const std::vector<double>& phi,
                                       double sigma2, double bandwidth,
                                       double resolution_bits) {
  aircomp_metrics m;
  m.mse = aggregation_mse(h, st, phi, sigma2);
  m.snr = computation_snr(h, st, phi, sigma2);
  m.rate = computation_rate(m.snr, bandwidth);
  m.time = transmission_time(resolution_bits, m.rate);
  auto [per_device, total] = round_energy(st, m.time);
  m.per_device_energy = std::move(per_device);
  m.total_energy = total;
  return m;
}

}  // namespace passfl

#endif  // PASSFL_METRICS_HPP
