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

#include "photosim/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photosim/error.hpp"

namespace photosim::link {

namespace {

void require_nonnegative(double v, const char* field) {
    if (!(v >= 0.0)) {
        throw ValidationError(std::string(field) + " must be >= 0");
    }
}

}  // namespace

void LossSpec::validate() const {
    require_nonnegative(propagation_db_per_cm, "losses.propagation_db_per_cm");
    require_nonnegative(splitter_db, "losses.splitter_db");
    require_nonnegative(combiner_db, "losses.combiner_db");
    require_nonnegative(mr_through_db, "losses.mr_through_db");
    require_nonnegative(mr_modulation_db, "losses.mr_modulation_db");
    require_nonnegative(eo_tuning_db_per_cm, "losses.eo_tuning_db_per_cm");
    require_nonnegative(to_tuning_db_per_cm, "losses.to_tuning_db_per_cm");
}

void OpticalPath::validate() const {
    require_nonnegative(waveguide_length_cm, "path.waveguide_length_cm");
    require_nonnegative(eo_tuned_length_cm, "path.eo_tuned_length_cm");
    require_nonnegative(to_tuned_length_cm, "path.to_tuned_length_cm");
}

OpticalPath operator+(const OpticalPath& a, const OpticalPath& b) {
    return {a.waveguide_length_cm + b.waveguide_length_cm,
            a.splits + b.splits,
            a.combines + b.combines,
            a.through_mrs + b.through_mrs,
            a.modulating_mrs + b.modulating_mrs,
            a.eo_tuned_length_cm + b.eo_tuned_length_cm,
            a.to_tuned_length_cm + b.to_tuned_length_cm};
}

void WavelengthGrid::validate() const {
    if (!(q_factor > 0.0)) {
        throw ValidationError("grid.q_factor must be > 0");
    }
    for (std::size_t k = 1; k < wavelengths_nm.size(); ++k) {
        if (!(wavelengths_nm[k] > wavelengths_nm[k - 1])) {
            throw ValidationError("grid.wavelengths_nm must be strictly increasing (index " + std::to_string(k) + ")");
        }
    }
}

WavelengthGrid WavelengthGrid::uniform(std::size_t count, double start_nm, double fsr_nm, double q_factor) {
    WavelengthGrid grid;
    grid.q_factor = q_factor;
    grid.wavelengths_nm.reserve(count);
    const double spacing = count > 0 ? fsr_nm / static_cast<double>(count) : 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        grid.wavelengths_nm.push_back(start_nm + static_cast<double>(k) * spacing);
    }
    return grid;
}

double path_loss(const OpticalPath& path, const LossSpec& losses) {
    path.validate();
    return losses.propagation_db_per_cm * path.waveguide_length_cm +
           losses.splitter_db * static_cast<double>(path.splits) +
           losses.combiner_db * static_cast<double>(path.combines) +
           losses.mr_through_db * static_cast<double>(path.through_mrs) +
           losses.mr_modulation_db * static_cast<double>(path.modulating_mrs) +
           losses.eo_tuning_db_per_cm * path.eo_tuned_length_cm +
           losses.to_tuning_db_per_cm * path.to_tuned_length_cm;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

LaserPower laser_power_required(double loss_db, double detector_sensitivity_dbm, std::size_t n_wavelengths,
                                double margin_db) {
    if (n_wavelengths == 0) {
        throw ContractViolation("laser needs at least one wavelength");
    }
    const double dbm =
        detector_sensitivity_dbm + loss_db + 10.0 * std::log10(static_cast<double>(n_wavelengths)) + margin_db;
    return {dbm, dbm_to_mw(dbm)};
}

double crosstalk_coefficient(std::size_t i, std::size_t j, const WavelengthGrid& grid) {
    if (i >= grid.size() || j >= grid.size()) {
        throw ContractViolation("channel index out of range");
    }
    if (i == j) {
        throw ContractViolation("self-coupling is signal, not crosstalk");
    }
    const double delta = grid.wavelengths_nm[i] / (2.0 * grid.q_factor);
    const double detuning = grid.wavelengths_nm[i] - grid.wavelengths_nm[j];
    return delta * delta / (detuning * detuning + delta * delta);
}

NoisePower noise_power(const WavelengthGrid& grid, std::span<const double> input_powers) {
    if (input_powers.size() != grid.size()) {
        throw ContractViolation("input power vector length " + std::to_string(input_powers.size()) +
                                " does not match grid size " + std::to_string(grid.size()));
    }
    for (double p : input_powers) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ContractViolation("input powers are fractions of unit power in [0, 1]");
        }
    }
    NoisePower out;
    out.per_channel.assign(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (i != j) {
                sum += crosstalk_coefficient(i, j, grid) * input_powers[i];
            }
        }
        out.per_channel[j] = sum;
        out.max_noise = std::max(out.max_noise, std::abs(sum));
    }
    return out;
}

ResolutionReport resolution(double max_noise, int cap_bits) {
    if (!(max_noise >= 0.0)) {
        throw ContractViolation("noise power must be nonnegative");
    }
    ResolutionReport report;
    report.max_noise_power = max_noise;
    if (max_noise == 0.0) {
        report.resolution_bits = cap_bits;
        return report;
    }
    report.resolution_levels = 1.0 / max_noise;
    const double bits = std::floor(std::log2(report.resolution_levels));
    report.resolution_bits = bits >= cap_bits ? cap_bits : std::max(0, static_cast<int>(bits));
    return report;
}

ResolutionReport grid_resolution(const WavelengthGrid& grid, int cap_bits) {
    const std::vector<double> unit(grid.size(), 1.0);
    return resolution(noise_power(grid, unit).max_noise, cap_bits);
}

}  // namespace photosim::link
