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

#include "photosim/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "photosim/error.hpp"
#include "photosim/rng.hpp"

namespace photosim::devices {

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) {
        throw ValidationError(field + " must satisfy " + rule);
    }
}

void check_length(const CrosstalkMatrix& matrix, std::span<const double> desired) {
    if (matrix.size() == 0) {
        throw EmptyBankError("crosstalk matrix has no rings");
    }
    if (desired.size() != matrix.size()) {
        throw ContractViolation("desired phase vector has " + std::to_string(desired.size()) +
                                " entries for a " + std::to_string(matrix.size()) + "-ring bank");
    }
}

}  // namespace

void MRDeviceSpec::validate() const {
    require(resonant_wavelength_nm > 0.0, "device.resonant_wavelength_nm", "> 0");
    require(q_factor > 0.0, "device.q_factor", "> 0");
    require(fsr_nm > 0.0, "device.fsr_nm", "> 0");
    require(through_loss_db >= 0.0, "device.through_loss_db", ">= 0");
    require(modulation_loss_db >= 0.0, "device.modulation_loss_db", ">= 0");
    require(fpv_drift_sigma_nm >= 0.0, "device.fpv_drift_sigma_nm", ">= 0");
}

void TuningSpec::validate() const {
    require(eo_power_uw_per_nm > 0.0, "tuning.eo_power_uw_per_nm", "> 0");
    require(eo_latency_s > 0.0, "tuning.eo_latency_s", "> 0");
    require(eo_max_range_nm > 0.0, "tuning.eo_max_range_nm", "> 0");
    require(to_power_mw_per_fsr > 0.0, "tuning.to_power_mw_per_fsr", "> 0");
    require(to_latency_s > 0.0, "tuning.to_latency_s", "> 0");
    require(eo_latency_s < to_latency_s, "tuning.eo_latency_s", "< tuning.to_latency_s");
}

void ThermalCrosstalkSpec::validate() const {
    require(ratio_at_zero >= 0.0 && ratio_at_zero <= 1.0, "thermal.ratio_at_zero", "0 <= x <= 1");
    require(decay_length_um > 0.0, "thermal.decay_length_um", "> 0");
    require(mr_pitch_um > 0.0, "thermal.mr_pitch_um", "> 0");
}

FPVSample sample_fpv_drift(std::size_t n, const MRDeviceSpec& spec, std::uint64_t seed) {
    if (n == 0) {
        throw EmptyBankError("cannot sample drift for zero rings");
    }
    FPVSample sample;
    sample.drifts_nm.resize(n);
    Rng rng(seed);
    for (double& d : sample.drifts_nm) {
        d = spec.fpv_drift_sigma_nm * rng.normal();
    }
    return sample;
}

TuningCost tuning_cost(double delta_lambda_nm, const TuningSpec& spec, double fsr_nm) {
    if (!(delta_lambda_nm >= 0.0)) {
        throw ContractViolation("tuning shift must be a nonnegative magnitude");
    }
    if (!(fsr_nm > 0.0)) {
        throw ContractViolation("fsr must be positive");
    }
    if (delta_lambda_nm <= spec.eo_max_range_nm) {
        return {delta_lambda_nm * spec.eo_power_uw_per_nm * 1e-3, spec.eo_latency_s, TuningMechanism::EO};
    }
    return {(delta_lambda_nm / fsr_nm) * spec.to_power_mw_per_fsr, spec.to_latency_s, TuningMechanism::TO};
}

double phase_crosstalk_ratio(double distance_um, const ThermalCrosstalkSpec& spec) {
    if (!(distance_um >= 0.0)) {
        throw ContractViolation("distance between rings must be nonnegative");
    }
    return spec.ratio_at_zero * std::exp(-distance_um / spec.decay_length_um);
}

CrosstalkMatrix build_crosstalk_matrix(std::size_t n, const ThermalCrosstalkSpec& spec) {
    if (n == 0) {
        throw EmptyBankError("crosstalk matrix needs at least one ring");
    }
    const auto dim = static_cast<Eigen::Index>(n);
    // Toeplitz: one ratio per separation.
    std::vector<double> by_offset(n, 1.0);
    for (std::size_t k = 1; k < n; ++k) {
        by_offset[k] = phase_crosstalk_ratio(static_cast<double>(k) * spec.mr_pitch_um, spec);
    }
    CrosstalkMatrix m{Eigen::MatrixXd(dim, dim)};
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            m.coefficients(i, j) = by_offset[static_cast<std::size_t>(std::abs(i - j))];
        }
    }
    return m;
}

double drift_to_phase(double drift_nm, double fsr_nm) {
    return 2.0 * std::numbers::pi * std::abs(drift_nm) / fsr_nm;
}

double phase_to_power_mw(double phase_rad, double to_power_mw_per_fsr) {
    return std::abs(phase_rad) / (2.0 * std::numbers::pi) * to_power_mw_per_fsr;
}

TedSolver::TedSolver(const CrosstalkMatrix& matrix, double to_power_mw_per_fsr, TedOptions options)
    : n_(matrix.size()), to_power_mw_per_fsr_(to_power_mw_per_fsr), condition_(1.0) {
    if (n_ == 0) {
        throw EmptyBankError("crosstalk matrix has no rings");
    }
    lu_.compute(matrix.coefficients);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!std::isfinite(condition_) || condition_ > options.condition_bound) {
        throw ConditioningError("condition estimate " + std::to_string(condition_) + " exceeds bound " +
                                std::to_string(options.condition_bound));
    }
}

TedSolution TedSolver::solve(std::span<const double> desired_phases) const {
    if (desired_phases.size() != n_) {
        throw ContractViolation("desired phase vector has " + std::to_string(desired_phases.size()) +
                                " entries for a " + std::to_string(n_) + "-ring bank");
    }
    const Eigen::Map<const Eigen::VectorXd> desired(desired_phases.data(), static_cast<Eigen::Index>(n_));
    const Eigen::VectorXd applied = lu_.solve(desired);

    TedSolution out;
    out.applied_phases.assign(applied.data(), applied.data() + applied.size());
    for (double phase : out.applied_phases) {
        out.total_power_mw += phase_to_power_mw(phase, to_power_mw_per_fsr_);
    }
    return out;
}

TedSolution ted_solve(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                      double to_power_mw_per_fsr, TedOptions options) {
    check_length(matrix, desired_phases);
    return TedSolver(matrix, to_power_mw_per_fsr, options).solve(desired_phases);
}

NaiveResult naive_compensation(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                               double to_power_mw_per_fsr, NaiveOptions options) {
    check_length(matrix, desired_phases);
    const auto dim = static_cast<Eigen::Index>(matrix.size());
    const Eigen::Map<const Eigen::VectorXd> desired(desired_phases.data(), dim);

    Eigen::VectorXd applied = desired;
    Eigen::VectorXd peak = applied.cwiseAbs();
    const double scale = std::max(1.0, desired.cwiseAbs().maxCoeff());
    const double blowup = 1e8 * scale;

    NaiveResult out;
    bool converged = false;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        const Eigen::VectorXd correction = desired - matrix.coefficients * applied;
        const double step = correction.cwiseAbs().maxCoeff();
        if (step <= options.tolerance * scale) {
            converged = true;
            out.iterations = it;
            break;
        }
        applied += correction;
        peak = peak.cwiseMax(applied.cwiseAbs());
        if (!applied.allFinite() || applied.cwiseAbs().maxCoeff() > blowup) {
            throw DivergenceError("phase corrections grew without bound after " + std::to_string(it + 1) +
                                  " iterations");
        }
    }
    if (!converged) {
        throw DivergenceError("no convergence within " + std::to_string(options.max_iterations) + " iterations");
    }

    out.applied_phases.assign(applied.data(), applied.data() + applied.size());
    out.peak_phases.assign(peak.data(), peak.data() + peak.size());
    for (double phase : out.peak_phases) {
        out.power_mw += phase_to_power_mw(phase, to_power_mw_per_fsr);
    }
    return out;
}

PowerComparison naive_vs_ted_power(const CrosstalkMatrix& matrix, std::span<const double> desired_phases,
                                   double to_power_mw_per_fsr, TedOptions ted_options,
                                   NaiveOptions naive_options) {
    const TedSolution ted = ted_solve(matrix, desired_phases, to_power_mw_per_fsr, ted_options);
    const NaiveResult naive = naive_compensation(matrix, desired_phases, to_power_mw_per_fsr, naive_options);
    return {naive.power_mw, ted.total_power_mw};
}

}  // namespace photosim::devices
