// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "passfl/channel.hpp"
#include "passfl/rng.hpp"
#include "passfl/scenario.hpp"
#include "passfl/system.hpp"

using namespace passfl;

namespace {

system_params test_params(double lambda = 0.06, double i_ref = 1.4) {
  return system_params::from_wavelength(lambda, 1e-12, 1e-3, 1e6, 32.0,
                                        i_ref);
}

}  // namespace

TEST_CASE("system params keep derived constants consistent") {
  auto p = test_params();
  p.validate();
  CHECK(p.wavenumber * p.wavelength == Catch::Approx(2.0 * pi).epsilon(1e-13));
  CHECK(p.aperture_coeff * 4.0 * pi ==
        Catch::Approx(p.wavelength).epsilon(1e-13));
  CHECK(p.min_spacing == Catch::Approx(0.03));

  auto q = system_params::from_frequency(5e9, 1e-12, 1e-3, 1e6, 32.0);
  q.validate();
  CHECK(q.wavelength == Catch::Approx(speed_of_light / 5e9));
}

TEST_CASE("shadowing of zero annihilates the link") {
  auto p = test_params();
  waveguide wg{50.0, 4.0, {1.0, 7.0, 13.0}};
  device dev{10.0, 3.0, 0.0};
  CHECK(pass_channel(p, wg, dev) == cplx{0.0, 0.0});
}

TEST_CASE("single-element channel matches hand evaluation") {
  // element at 10 m, device (10, 3, 0), altitude 4: distance is exactly 5
  auto p = test_params(0.06, 1.4);
  waveguide wg{50.0, 4.0, {10.0}};
  device dev{10.0, 3.0, 1.0};
  cplx h = pass_channel(p, wg, dev);

  double xi = 0.06 / (4.0 * pi);
  CHECK(std::abs(h) == Catch::Approx(xi / 5.0).epsilon(1e-12));
  CHECK(std::abs(h) == Catch::Approx(9.5493e-4).epsilon(1e-4));
  // phase: -psi * (D + i_ref * l) = -(2*pi/0.06) * (5 + 14)
  double psi = 2.0 * pi / 0.06;
  cplx expected = std::polar(xi / 5.0, -psi * 19.0);
  CHECK(h.real() == Catch::Approx(expected.real()).margin(1e-15));
  CHECK(h.imag() == Catch::Approx(expected.imag()).margin(1e-15));
}

TEST_CASE("far devices are bounded by the per-term magnitude") {
  auto p = test_params();
  waveguide wg{50.0, 5.0, uniform_positions(32, 50.0, p.min_spacing)};
  device dev{25.0, 1e6, 1.0};
  CHECK(std::abs(pass_channel(p, wg, dev)) <= p.aperture_coeff * 32.0 / 1e6);
}

TEST_CASE("channel vector matches per-device evaluation bitwise") {
  auto p = test_params();
  waveguide wg{50.0, 5.0, uniform_positions(8, 50.0, p.min_spacing)};

  SECTION("empty device list") {
    CHECK(channel_vector(p, wg, {}).empty());
  }
  SECTION("identical devices get identical entries") {
    device dev{20.0, -4.0, 1.0};
    auto h = channel_vector(p, wg, {dev, dev});
    CHECK(h[0] == h[1]);
  }
  SECTION("three random devices, entrywise equality") {
    rng stream(42);
    std::vector<device> devs;
    for (int i = 0; i < 3; ++i)
      devs.push_back({stream.uniform(0.0, 50.0),
                      stream.uniform(-25.0, 25.0), 1.0});
    auto h = channel_vector(p, wg, devs);
    for (int i = 0; i < 3; ++i) CHECK(h[i] == pass_channel(p, wg, devs[i]));
  }
}

TEST_CASE("norm bound on the scheduled channel") {
  auto p = test_params();

  SECTION("single device hand value") {
    device dev{10.0, 3.0, 1.0};
    double a = norm_bound_A(p, 32, 4.0, {dev});
    double xi = 0.06 / (4.0 * pi);
    CHECK(a == Catch::Approx(xi * xi * 32.0 / 25.0).epsilon(1e-12));
  }
  SECTION("vanishing shadowing gives zero") {
    device dev{10.0, 3.0, 0.0};
    CHECK(norm_bound_A(p, 32, 4.0, {dev, dev}) == 0.0);
  }
  SECTION("two identical devices double the bound") {
    device dev{10.0, 3.0, 1.0};
    double one = norm_bound_A(p, 32, 4.0, {dev});
    double two = norm_bound_A(p, 32, 4.0, {dev, dev});
    CHECK(two == Catch::Approx(2.0 * one).epsilon(1e-12));
  }
  SECTION("empty schedule is rejected") {
    CHECK_THROWS_AS(norm_bound_A(p, 32, 4.0, {}), infeasible_error);
  }
}

TEST_CASE("property: scheduled channel power stays below the bound") {
  // The bound caps the incoherent per-element power deterministically and
  // the coherent power in expectation; individual placements can exceed it
  // through phase alignment, so the coherent check is on the sample mean.
  auto p = test_params();
  rng stream(7);
  std::vector<device> devs;
  for (int i = 0; i < 4; ++i)
    devs.push_back(
        {stream.uniform(0.0, 50.0), stream.uniform(-25.0, 25.0), 1.0});
  double bound = norm_bound_A(p, 32, 5.0, devs);

  waveguide wg{50.0, 5.0, {}};
  double coherent_sum = 0.0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    // random feasible positions: sorted draws spread by the min spacing
    std::vector<double> raw(32);
    for (auto& x : raw) x = stream.uniform(0.0, 50.0 - 31.0 * p.min_spacing);
    std::sort(raw.begin(), raw.end());
    wg.positions.resize(32);
    for (int n = 0; n < 32; ++n)
      wg.positions[n] = raw[n] + n * p.min_spacing;
    REQUIRE(satisfies_spacing(wg.positions, p.min_spacing, 50.0));

    double incoherent = 0.0;
    double coherent = 0.0;
    for (const auto& dev : devs) {
      double amp = p.aperture_coeff * dev.shadowing;
      for (double pos : wg.positions) {
        double d = element_device_distance(pos, wg.altitude, dev);
        incoherent += amp * amp / (d * d);
      }
      coherent += std::norm(pass_channel(p, wg, dev));
    }
    CHECK(incoherent <= bound * (1.0 + 1e-12));
    coherent_sum += coherent;
  }
  CHECK(coherent_sum / trials <= bound);
}

TEST_CASE("property: triangle-inequality magnitude bound and distance floor") {
  auto p = test_params();
  rng stream(99);
  for (int trial = 0; trial < 200; ++trial) {
    waveguide wg{50.0, 5.0, {}};
    int n = 1 + static_cast<int>(stream.below(16));
    wg.positions.resize(n);
    for (auto& x : wg.positions) x = stream.uniform(0.0, 50.0);
    std::sort(wg.positions.begin(), wg.positions.end());
    device dev{stream.uniform(0.0, 50.0), stream.uniform(-25.0, 25.0),
               stream.uniform(0.0, 2.0)};

    double bound = 0.0;
    for (double pos : wg.positions) {
      double d = element_device_distance(pos, wg.altitude, dev);
      CHECK(d >= wg.altitude);
      bound += 1.0 / d;
    }
    bound *= p.aperture_coeff * dev.shadowing;
    CHECK(std::abs(pass_channel(p, wg, dev)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("property: joint x-translation invariance") {
  rng stream(5);
  waveguide wg{80.0, 5.0, uniform_positions(8, 40.0, 0.03)};
  device dev{17.0, -9.0, 1.0};
  double shift = 7.25;

  SECTION("with zero reflective index the coefficient is invariant") {
    auto p0 = test_params(0.06, 1e-30);  // effectively zero in-guide phase
    auto p = p0;
    p.reflective_index = 0.0;
    waveguide moved = wg;
    for (auto& x : moved.positions) x += shift;
    device moved_dev{dev.x + shift, dev.y, dev.shadowing};
    cplx a = pass_channel(p, wg, dev);
    cplx b = pass_channel(p, moved, moved_dev);
    CHECK(a.real() == Catch::Approx(b.real()).margin(1e-15));
    CHECK(a.imag() == Catch::Approx(b.imag()).margin(1e-15));
  }
  SECTION("magnitude is invariant for any reflective index") {
    auto p = test_params(0.06, 1.4);
    waveguide moved = wg;
    for (auto& x : moved.positions) x += shift;
    device moved_dev{dev.x + shift, dev.y, dev.shadowing};
    CHECK(std::abs(pass_channel(p, wg, dev)) ==
          Catch::Approx(std::abs(pass_channel(p, moved, moved_dev)))
              .epsilon(1e-12));
  }
}

TEST_CASE("line-of-sight array channel") {
  auto p = test_params();

  SECTION("single antenna straight above the device") {
    mimo_array arr{25.0, 0.0, 5.0, 1, 0.03};
    device dev{25.0, 0.0, 1.0};
    auto h = mimo_channel(p, arr, dev);
    REQUIRE(h.size() == 1);
    CHECK(std::abs(h[0]) == Catch::Approx(p.aperture_coeff / 5.0).epsilon(1e-12));
  }
  SECTION("zero shadowing zeroes every antenna") {
    mimo_array arr{25.0, 0.0, 5.0, 4, 0.03};
    device dev{10.0, 3.0, 0.0};
    for (const auto& c : mimo_channel(p, arr, dev))
      CHECK(c == cplx{0.0, 0.0});
  }
  SECTION("device on the perpendicular bisector sees symmetric magnitudes") {
    mimo_array arr{25.0, 0.0, 5.0, 2, 0.03};
    device dev{25.0, 8.0, 1.0};
    auto h = mimo_channel(p, arr, dev);
    CHECK(std::abs(h[0]) == Catch::Approx(std::abs(h[1])).epsilon(1e-12));
  }
  SECTION("matrix columns equal per-device vectors") {
    mimo_array arr{25.0, 0.0, 5.0, 3, 0.03};
    std::vector<device> devs{{10.0, 3.0, 1.0}, {40.0, -12.0, 0.7}};
    auto cols = mimo_channel_matrix(p, arr, devs);
    REQUIRE(cols.size() == 2);
    for (std::size_t k = 0; k < devs.size(); ++k) {
      auto h = mimo_channel(p, arr, devs[k]);
      for (int m = 0; m < 3; ++m) CHECK(cols[k][m] == h[m]);
    }
  }
}

TEST_CASE("scenario generation is deterministic and in-box") {
  auto sc1 = generate_scenario(8, 50.0, 5.0, 32, 0.03, 123);
  auto sc2 = generate_scenario(8, 50.0, 5.0, 32, 0.03, 123);
  REQUIRE(sc1.devices.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(sc1.devices[k].x == sc2.devices[k].x);
    CHECK(sc1.devices[k].y == sc2.devices[k].y);
  }
  CHECK(sc1.guide.length == 50.0);
  double total_weight = 0.0;
  for (const auto& d : sc1.devices) total_weight += d.weight;
  CHECK(total_weight == Catch::Approx(1.0).epsilon(1e-12));
}
