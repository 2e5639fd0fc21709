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
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace photosim::devices {

/// Optical parameters of one microring. The extinction ratio is a property of
/// the device but feeds no model here, so it is not stored.
struct MRDeviceSpec {
    double resonant_wavelength_nm = 1550.0;
    double q_factor = 8000.0;
    double fsr_nm = 18.0;
    double through_loss_db = 0.02;
    double modulation_loss_db = 0.72;
    double fpv_drift_sigma_nm = 2.1;

    void validate() const;

    friend bool operator==(const MRDeviceSpec&, const MRDeviceSpec&) = default;
};

struct TuningSpec {
    double eo_power_uw_per_nm = 4.0;
    double eo_latency_s = 20e-9;
    double eo_max_range_nm = 1.0;
    double to_power_mw_per_fsr = 27.5;
    double to_latency_s = 4e-6;

    void validate() const;

    friend bool operator==(const TuningSpec&, const TuningSpec&) = default;
};

/// Exponential thermal phase-crosstalk model between heaters on one bank.
struct ThermalCrosstalkSpec {
    double ratio_at_zero = 0.4;
    double decay_length_um = 5.0;
    double mr_pitch_um = 5.0;

    void validate() const;

    friend bool operator==(const ThermalCrosstalkSpec&, const ThermalCrosstalkSpec&) = default;
};

/// coefficients(i, j): fraction of heater j's phase that appears at ring i.
struct CrosstalkMatrix {
    Eigen::MatrixXd coefficients;

    std::size_t size() const { return static_cast<std::size_t>(coefficients.rows()); }
};

struct FPVSample {
    std::vector<double> drifts_nm;  // signed
};

enum class TuningMechanism { EO, TO };

struct TuningCost {
    double power_mw = 0.0;
    double latency_s = 0.0;
    TuningMechanism mechanism = TuningMechanism::EO;
};

/// Zero-mean Gaussian resonance drifts, deterministic in `seed`.
FPVSample sample_fpv_drift(std::size_t n, const MRDeviceSpec& spec, std::uint64_t seed);

/// Hybrid policy: EO within `eo_max_range_nm`, TO (linear per FSR) beyond it.
TuningCost tuning_cost(double delta_lambda_nm, const TuningSpec& spec, double fsr_nm);

double phase_crosstalk_ratio(double distance_um, const ThermalCrosstalkSpec& spec);

/// Rings equally spaced at `spec.mr_pitch_um`; unit diagonal.
CrosstalkMatrix build_crosstalk_matrix(std::size_t n, const ThermalCrosstalkSpec& spec);

/// Phase needed to pull a resonance back by `drift_nm` (2*pi per FSR).
double drift_to_phase(double drift_nm, double fsr_nm);

/// Heater power for a phase magnitude under the 2*pi == one FSR convention.
double phase_to_power_mw(double phase_rad, double to_power_mw_per_fsr);

struct TedOptions {
    double condition_bound = 1e12;
};

struct TedSolution {
    std::vector<double> applied_phases;
    double total_power_mw = 0.0;
};

/// Factorizes a crosstalk matrix once so that many banks sharing the same
/// layout can be solved cheaply.
class TedSolver {
public:
    TedSolver(const CrosstalkMatrix& matrix, double to_power_mw_per_fsr, TedOptions options = {});

    TedSolution solve(std::span<const double> desired_phases) const;
    std::size_t size() const { return n_; }
    double condition_estimate() const { return condition_; }

private:
    std::size_t n_;
    double to_power_mw_per_fsr_;
    double condition_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Collective (thermal eigen-decomposition) tuning: solves matrix * applied = desired.
TedSolution ted_solve(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                      double to_power_mw_per_fsr, TedOptions options = {});

struct NaiveOptions {
    std::size_t max_iterations = 10000;
    double tolerance = 1e-12;
};

/// Result of per-ring independent compensation. Each heater is driven through
/// the whole correction sequence, so its power budget is the peak drive it
/// reached; `power_mw` sums those peaks.
struct NaiveResult {
    std::vector<double> applied_phases;
    std::vector<double> peak_phases;
    double power_mw = 0.0;
    std::size_t iterations = 0;
};

/// Fixed-point compensation: start at applied = desired, then every ring adds
/// the correction that cancels its observed phase error, until converged.
NaiveResult naive_compensation(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                               double to_power_mw_per_fsr, NaiveOptions options = {});

struct PowerComparison {
    double naive_power_mw = 0.0;
    double ted_power_mw = 0.0;
};

PowerComparison naive_vs_ted_power(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                                   double to_power_mw_per_fsr, TedOptions ted_options = {},
                                   NaiveOptions naive_options = {});

}  // namespace photosim::devices
