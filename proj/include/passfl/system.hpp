// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_SYSTEM_HPP
#define PASSFL_SYSTEM_HPP

#include <cmath>
#include <string>

#include "passfl/errors.hpp"

namespace passfl {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double pi = 3.14159265358979323846;

/// Converts a power level in dBm to watts: x dBm = 10^(x/10) mW.
inline double dbm_to_watts(double dbm) {
  return std::pow(10.0, dbm / 10.0) * 1e-3;
}

inline double watts_to_dbm(double watts) {
  return 10.0 * std::log10(watts * 1e3);
}

/// Physical constants and per-link budgets shared by every module.
///
/// The derived fields (wavelength, wavenumber, aperture coefficient) are
/// kept consistent by the factory functions; validate() re-checks them.
struct system_params {
  double carrier_frequency = 0.0;  // Hz
  double wavelength = 0.0;         // m, = c / f0
  double wavenumber = 0.0;         // rad/m, = 2*pi / wavelength
  double aperture_coeff = 0.0;     // dimensionless, = wavelength / (4*pi)
  double reflective_index = 1.4;   // in-waveguide phase index
  double noise_power = 0.0;        // W
  double power_cap = 0.0;          // W, per-device transmit budget
  double bandwidth = 0.0;          // Hz
  double resolution_bits = 0.0;    // target bits per model entry
  double min_spacing = 0.0;        // m, smallest allowed element gap

  static system_params from_frequency(double f0, double noise_w,
                                      double power_w, double bandwidth_hz,
                                      double resolution_bits,
                                      double i_ref = 1.4,
                                      double spacing = 0.0) {
    system_params p;
    p.carrier_frequency = f0;
    p.wavelength = speed_of_light / f0;
    return fill_derived(p, noise_w, power_w, bandwidth_hz, resolution_bits,
                        i_ref, spacing);
  }

  /// Same as from_frequency but pins the wavelength exactly (useful when a
  /// scenario is specified in terms of lambda rather than f0).
  static system_params from_wavelength(double lambda, double noise_w,
                                       double power_w, double bandwidth_hz,
                                       double resolution_bits,
                                       double i_ref = 1.4,
                                       double spacing = 0.0) {
    system_params p;
    p.wavelength = lambda;
    p.carrier_frequency = speed_of_light / lambda;
    return fill_derived(p, noise_w, power_w, bandwidth_hz, resolution_bits,
                        i_ref, spacing);
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0))
        throw error(std::string("system_params: ") + name +
                    " must be strictly positive");
    };
    positive(carrier_frequency, "carrier_frequency");
    positive(wavelength, "wavelength");
    positive(wavenumber, "wavenumber");
    positive(aperture_coeff, "aperture_coeff");
    positive(reflective_index, "reflective_index");
    positive(noise_power, "noise_power");
    positive(power_cap, "power_cap");
    positive(bandwidth, "bandwidth");
    positive(resolution_bits, "resolution_bits");
    positive(min_spacing, "min_spacing");
    if (std::abs(wavenumber * wavelength - 2.0 * pi) > 1e-12 * 2.0 * pi)
      throw error("system_params: wavenumber * wavelength != 2*pi");
    if (std::abs(aperture_coeff * 4.0 * pi - wavelength) > 1e-12 * wavelength)
      throw error("system_params: aperture_coeff * 4*pi != wavelength");
    if (min_spacing < wavelength / 2.0 * (1.0 - 1e-12))
      throw error("system_params: min_spacing below half wavelength");
  }

 private:
  static system_params fill_derived(system_params p, double noise_w,
                                    double power_w, double bandwidth_hz,
                                    double resolution_bits, double i_ref,
                                    double spacing) {
    p.wavenumber = 2.0 * pi / p.wavelength;
    p.aperture_coeff = p.wavelength / (4.0 * pi);
    p.reflective_index = i_ref;
    p.noise_power = noise_w;
    p.power_cap = power_w;
    p.bandwidth = bandwidth_hz;
    p.resolution_bits = resolution_bits;
    p.min_spacing = spacing > 0.0 ? spacing : p.wavelength / 2.0;
    return p;
  }
};

}  // namespace passfl

#endif  // PASSFL_SYSTEM_HPP
