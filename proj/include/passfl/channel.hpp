// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_CHANNEL_HPP
#define PASSFL_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "passfl/errors.hpp"
#include "passfl/scenario.hpp"
#include "passfl/system.hpp"

namespace passfl {

using cplx = std::complex<double>;

/// Distance from waveguide location `pos` (at the guide altitude) to the
/// device. Lower-bounded by the altitude, so never zero.
inline double element_device_distance(double pos, double altitude,
                                      const device& dev) {
  double dx = pos - dev.x;
  return std::sqrt(dx * dx + dev.y * dev.y + altitude * altitude);
}

/// Free-space contribution of one pinching element: in-waveguide phase
/// accrues with the reflective index, free-space phase and 1/D attenuation
/// with the element-device distance.
inline cplx element_coefficient(const system_params& p, double pos,
                                double altitude, const device& dev) {
  double dist = element_device_distance(pos, altitude, dev);
  double phase_len = dist + p.reflective_index * pos;
  return std::polar(1.0 / dist, -p.wavenumber * phase_len);
}

/// Uplink channel between the waveguide and one device: the coherent sum of
/// all element contributions, scaled by the aperture coefficient and the
/// device's shadowing.
inline cplx pass_channel(const system_params& p, const waveguide& wg,
                         const device& dev) {
  cplx acc{0.0, 0.0};
  for (double pos : wg.positions)
    acc += element_coefficient(p, pos, wg.altitude, dev);
  return p.aperture_coeff * dev.shadowing * acc;
}

inline std::vector<cplx> channel_vector(const system_params& p,
                                        const waveguide& wg,
                                        const std::vector<device>& devices) {
  std::vector<cplx> h(devices.size());
  for (std::size_t k = 0; k < devices.size(); ++k)
    h[k] = pass_channel(p, wg, devices[k]);
  return h;
}

/// Norm budget for the effective channel of a scheduled set: each device
/// contributes |xi * alpha_k|^2 * N / D_k(x_k)^2, where D_k(x_k) is the
/// distance from the point on the guide directly alongside the device.
inline double norm_bound_A(const system_params& p, int element_count,
                           double altitude,
                           const std::vector<device>& scheduled) {
  if (scheduled.empty()) throw infeasible_error("empty schedule");
  double a = 0.0;
  for (const auto& dev : scheduled) {
    double amp = p.aperture_coeff * dev.shadowing;
    double d2 = dev.y * dev.y + altitude * altitude;
    a += amp * amp * static_cast<double>(element_count) / d2;
  }
  return a;
}

/// Line-of-sight channel between a fixed array and one device, one entry
/// per antenna. Uses the exact per-element spherical distance so the path
/// loss law matches the waveguide model element for element.
inline std::vector<cplx> mimo_channel(const system_params& p,
                                      const mimo_array& arr,
                                      const device& dev) {
  std::vector<cplx> h(arr.element_count);
  for (int m = 0; m < arr.element_count; ++m) {
    double ex = arr.center_x + arr.element_offset(m);
    double dx = ex - dev.x;
    double dy = arr.center_y - dev.y;
    double dist =
        std::sqrt(dx * dx + dy * dy + arr.altitude * arr.altitude);
    h[m] = p.aperture_coeff * dev.shadowing *
           std::polar(1.0 / dist, -p.wavenumber * dist);
  }
  return h;
}

/// Column-major channel matrix: column k is mimo_channel for device k.
inline std::vector<std::vector<cplx>> mimo_channel_matrix(
    const system_params& p, const mimo_array& arr,
    const std::vector<device>& devices) {
  std::vector<std::vector<cplx>> columns(devices.size());
  for (std::size_t k = 0; k < devices.size(); ++k)
    columns[k] = mimo_channel(p, arr, devices[k]);
  return columns;
}

}  // namespace passfl

#endif  // PASSFL_CHANNEL_HPP
