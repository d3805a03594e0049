// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "passfl/mimo.hpp"
#include "passfl/rng.hpp"

using namespace passfl;

namespace {

system_params test_params(double sigma2 = 1e-12, double cap = 1e-3) {
  return system_params::from_wavelength(0.06, sigma2, cap, 1e6, 32.0);
}

scenario random_scenario(rng& stream, int k, double edge) {
  scenario sc;
  sc.region_edge = edge;
  sc.guide.length = edge;
  sc.guide.altitude = 5.0;
  sc.guide.positions = {edge / 2.0};
  for (int i = 0; i < k; ++i)
    sc.devices.push_back({stream.uniform(0.0, edge),
                          stream.uniform(-edge / 2.0, edge / 2.0), 1.0, 1,
                          1.0 / k});
  return sc;
}

mimo_array center_array(double edge, int m, double lambda) {
  return {edge / 2.0, 0.0, 5.0, m, lambda / 2.0};
}

}  // namespace

TEST_CASE("mimo: single antenna combiner cancels the channel phase") {
  auto p = test_params();
  rng stream(1);
  auto sc = random_scenario(stream, 1, 20.0);
  auto arr = center_array(20.0, 1, p.wavelength);

  solver_config cfg;
  cfg.k_min = 1;
  auto result = optimize_mimo_baseline(sc, p, arr, cfg);

  REQUIRE(result.combiner.size() == 1);
  CHECK(std::abs(std::abs(result.combiner[0]) - 1.0) < 1e-12);
  // effective channel is real positive: the combiner undoes the phase
  cplx g = result.effective_channels[0];
  CHECK(g.real() > 0.0);
  CHECK(std::abs(g.imag()) <= 1e-9 * std::abs(g));
}

TEST_CASE("mimo: reported metrics equal the scalar pipeline on g") {
  auto p = test_params();
  rng stream(7);
  auto sc = random_scenario(stream, 4, 30.0);
  auto arr = center_array(30.0, 8, p.wavelength);

  solver_config cfg;
  cfg.k_min = 3;
  auto result = optimize_mimo_baseline(sc, p, arr, cfg);

  std::vector<double> phi(4, 0.25);
  // unit-norm combiner: effective noise equals the physical noise power
  CHECK(result.effective_noise ==
        Catch::Approx(p.noise_power).epsilon(1e-9));
  auto m = compute_metrics(result.effective_channels, result.state, phi,
                           result.effective_noise, p.bandwidth,
                           p.resolution_bits);
  CHECK(m.mse == Catch::Approx(result.metrics.mse).epsilon(1e-12));
  CHECK(m.snr == Catch::Approx(result.metrics.snr).epsilon(1e-12));
  CHECK(m.total_energy ==
        Catch::Approx(result.metrics.total_energy).epsilon(1e-12));
}

TEST_CASE("mimo: energy trace nonincreasing and caps respected") {
  auto p = test_params();
  rng stream(55);
  for (int inst = 0; inst < 10; ++inst) {
    int k = 2 + static_cast<int>(stream.below(4));
    auto sc = random_scenario(stream, k, 40.0);
    auto arr = center_array(40.0, 8, p.wavelength);
    solver_config cfg;
    cfg.k_min = std::max(1, k - 1);
    auto result = optimize_mimo_baseline(sc, p, arr, cfg);
    const auto& trace = result.trace.outer_energy;
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] * (1.0 + 1e-12));
    for (const auto& b : result.state.power_scalings)
      CHECK(std::norm(b) <= p.power_cap * (1.0 + 1e-9));
    CHECK(result.state.scheduled_count() >= cfg.k_min);
  }
}

TEST_CASE("mimo: more antennas never cost more energy") {
  auto p = test_params();
  rng stream(99);
  for (int inst = 0; inst < 20; ++inst) {
    int k = 2 + static_cast<int>(stream.below(3));
    auto sc = random_scenario(stream, k, 25.0);
    solver_config cfg;
    cfg.k_min = k - 1;
    auto small = optimize_mimo_baseline(sc, p, center_array(25.0, 1,
                                                            p.wavelength),
                                        cfg);
    auto large = optimize_mimo_baseline(sc, p, center_array(25.0, 8,
                                                            p.wavelength),
                                        cfg);
    CHECK(large.metrics.total_energy <=
          small.metrics.total_energy * (1.0 + 1e-9));
  }
}
