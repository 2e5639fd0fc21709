/*
 * Copyright 2026 The photosim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace photosim::link {

/// Per-element photonic losses. Defaults are the published device figures.
struct LossSpec {
    double propagation_db_per_cm = 1.0;
    double splitter_db = 0.13;
    double combiner_db = 0.9;
    double mr_through_db = 0.02;
    double mr_modulation_db = 0.72;
    double eo_tuning_db_per_cm = 6.0;
    double to_tuning_db_per_cm = 1.0;

    void validate() const;

    friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

/// What one optical signal traverses between the laser and the detector.
struct OpticalPath {
    double waveguide_length_cm = 0.0;
    std::size_t splits = 0;
    std::size_t combines = 0;
    std::size_t through_mrs = 0;
    std::size_t modulating_mrs = 0;
    double eo_tuned_length_cm = 0.0;
    double to_tuned_length_cm = 0.0;

    void validate() const;
};

/// Concatenation of two paths.
OpticalPath operator+(const OpticalPath& a, const OpticalPath& b);

/// Channel wavelengths (strictly increasing) sharing one bank, plus the ring Q.
struct WavelengthGrid {
    std::vector<double> wavelengths_nm;
    double q_factor = 8000.0;

    std::size_t size() const { return wavelengths_nm.size(); }
    void validate() const;

    /// `count` channels spaced fsr/count apart starting at `start_nm`.
    static WavelengthGrid uniform(std::size_t count, double start_nm, double fsr_nm, double q_factor);
};

struct LaserPower {
    double dbm = 0.0;
    double mw = 0.0;
};

struct NoisePower {
    std::vector<double> per_channel;
    double max_noise = 0.0;
};

struct ResolutionReport {
    double max_noise_power = 0.0;
    /// +inf when the noise is zero.
    double resolution_levels = std::numeric_limits<double>::infinity();
    int resolution_bits = 0;
};

inline constexpr int kDefaultResolutionCapBits = 16;

/// Sum of all loss contributions in dB.
double path_loss(const OpticalPath& path, const LossSpec& losses);

/// Minimum laser power so every channel still reaches the detector:
/// P = sensitivity + loss + 10 log10(channels) + margin.
LaserPower laser_power_required(double loss_db, double detector_sensitivity_dbm, std::size_t n_wavelengths,
                                double margin_db = 0.0);

double dbm_to_mw(double dbm);

/// Lorentzian leakage of channel j into victim channel i, with the victim's
/// 3 dB half-width delta = lambda_i / (2Q).
double crosstalk_coefficient(std::size_t i, std::size_t j, const WavelengthGrid& grid);

/// noise[j] = sum over i != j of coefficient(i, j) * input_powers[i].
NoisePower noise_power(const WavelengthGrid& grid, std::span<const double> input_powers);

ResolutionReport resolution(double max_noise, int cap_bits = kDefaultResolutionCapBits);

/// Convenience: resolution of `grid` with every channel at unit power.
ResolutionReport grid_resolution(const WavelengthGrid& grid, int cap_bits = kDefaultResolutionCapBits);

}  // namespace photosim::link
