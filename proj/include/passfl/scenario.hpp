// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_SCENARIO_HPP
#define PASSFL_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "passfl/errors.hpp"
#include "passfl/rng.hpp"
#include "passfl/system.hpp"

namespace passfl {

/// A single-antenna edge device in the xy-plane (z = 0).
struct device {
  double x = 0.0;               // m
  double y = 0.0;               // m
  double shadowing = 1.0;       // alpha_k >= 0
  std::int64_t dataset_size = 1;
  double weight = 0.0;          // phi_k in (0, 1]; weights sum to 1
};

/// Dielectric waveguide along the x-axis at y = 0, altitude z = altitude.
/// `positions` holds the current element locations, ascending.
struct waveguide {
  double length = 0.0;    // m
  double altitude = 0.0;  // m
  std::vector<double> positions;

  int element_count() const { return static_cast<int>(positions.size()); }
};

/// Uniform linear array at the region center, elements along the x-axis.
struct mimo_array {
  double center_x = 0.0;
  double center_y = 0.0;
  double altitude = 0.0;
  int element_count = 1;
  double spacing = 0.0;  // m, defaults to lambda/2 at construction sites

  /// x-offset of element m (0-based) relative to the array center.
  double element_offset(int m) const {
    return (static_cast<double>(m) - 0.5 * (element_count - 1)) * spacing;
  }
};

struct scenario {
  std::vector<device> devices;
  waveguide guide;
  double region_edge = 0.0;  // D, m
  std::uint64_t seed = 0;
};

/// True when positions lie in [0, L] sorted with pairwise gaps >= spacing.
inline bool satisfies_spacing(const std::vector<double>& positions,
                              double spacing, double length) {
  for (std::size_t n = 0; n < positions.size(); ++n) {
    if (positions[n] < -1e-12 || positions[n] > length + 1e-12) return false;
    if (n > 0 && positions[n] - positions[n - 1] < spacing * (1.0 - 1e-12))
      return false;
  }
  return true;
}

/// Evenly spread N elements over [0, L]. Throws when N elements cannot fit
/// at the required spacing.
inline std::vector<double> uniform_positions(int n, double length,
                                             double spacing) {
  if (n < 1) throw error("uniform_positions: need at least one element");
  if (static_cast<double>(n) * spacing > length)
    throw infeasible_error("waveguide too short");
  std::vector<double> pos(n);
  if (n == 1) {
    pos[0] = length / 2.0;
    return pos;
  }
  double step = length / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) pos[i] = step * i;
  return pos;
}

/// Draws K device positions i.i.d. uniform over [0,D] x [-D/2, D/2] with
/// unit shadowing and weights proportional to (equal) dataset sizes. The
/// waveguide runs the full region edge at the given altitude.
inline scenario generate_scenario(int num_devices, double region_edge,
                                  double altitude, int elements,
                                  double spacing, std::uint64_t seed,
                                  double length = 0.0,
                                  std::int64_t samples_per_device = 1) {
  scenario sc;
  sc.region_edge = region_edge;
  sc.seed = seed;
  sc.guide.length = length > 0.0 ? length : region_edge;
  sc.guide.altitude = altitude;
  sc.guide.positions = uniform_positions(elements, sc.guide.length, spacing);
  rng stream(derive_seed(seed, 0x5ce7a210));
  sc.devices.resize(num_devices);
  for (auto& d : sc.devices) {
    d.x = stream.uniform(0.0, region_edge);
    d.y = stream.uniform(-region_edge / 2.0, region_edge / 2.0);
    d.shadowing = 1.0;
    d.dataset_size = samples_per_device;
  }
  // phi_k = I_k / sum(I_j); exact 1/K for the uniform split
  double total = 0.0;
  for (const auto& d : sc.devices) total += static_cast<double>(d.dataset_size);
  for (auto& d : sc.devices)
    d.weight = static_cast<double>(d.dataset_size) / total;
  return sc;
}

}  // namespace passfl

#endif  // PASSFL_SCENARIO_HPP
