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

#include "photosim/perf_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "photosim/error.hpp"

namespace photosim::perf {

namespace {

constexpr double kSpeedOfLight = 299792458.0;  // m/s

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t pds_per_unit(const vdp::VDPUnitConfig& unit) { return unit.arms + (unit.arms > 1 ? 1 : 0); }

std::size_t vcsels_per_unit(const vdp::VDPUnitConfig& unit) { return unit.arms > 1 ? unit.arms : 0; }

double bank_length_cm(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    return 2.0 * static_cast<double>(unit.mrs_per_bank) * cfg.thermal.mr_pitch_um * 1e-4;
}

// Drift compensation for every bank of `units` units of one kind. Drifts the
// EO tuners can absorb are charged to EO; the rest go to the heaters.
void compensate_fpv(const vdp::VDPUnitConfig& unit, std::size_t units, const AcceleratorConfig& cfg,
                    std::span<const double> drifts, PowerBreakdown& out) {
    const std::size_t bank = unit.mrs_per_bank;
    const std::size_t banks = units * unit.arms * 2;
    const auto matrix = devices::build_crosstalk_matrix(bank, cfg.thermal);
    const devices::TedSolver solver(matrix, cfg.tuning.to_power_mw_per_fsr, {cfg.solver.condition_bound});
    const devices::NaiveOptions naive{cfg.solver.naive_max_iterations, cfg.solver.naive_tolerance};

    std::vector<double> desired(bank);
    for (std::size_t b = 0; b < banks; ++b) {
        bool any = false;
        for (std::size_t i = 0; i < bank; ++i) {
            const double drift = std::abs(drifts[b * bank + i]);
            const auto cost = devices::tuning_cost(drift, cfg.tuning, cfg.device.fsr_nm);
            if (cost.mechanism == devices::TuningMechanism::EO) {
                out.eo_tuning_mw += cost.power_mw;
                desired[i] = 0.0;
            } else {
                desired[i] = devices::drift_to_phase(drift, cfg.device.fsr_nm);
                any = true;
            }
        }
        if (!any) {
            continue;
        }
        out.to_tuning_mw += cfg.ted_enabled
                                ? solver.solve(desired).total_power_mw
                                : devices::naive_compensation(matrix, desired, cfg.tuning.to_power_mw_per_fsr, naive)
                                      .power_mw;
    }
}

}  // namespace

Inventory inventory(const AcceleratorConfig& cfg) {
    const auto conv = cfg.conv_unit();
    const auto fc = cfg.fc_unit();
    Inventory inv;
    inv.conv_arms = cfg.n * conv.arms;
    inv.fc_arms = cfg.m * fc.arms;
    inv.mrs = cfg.n * conv.mr_count() + cfg.m * fc.mr_count();
    inv.banks = 2 * (inv.conv_arms + inv.fc_arms);
    inv.pds = cfg.n * pds_per_unit(conv) + cfg.m * pds_per_unit(fc);
    inv.vcsels = cfg.n * vcsels_per_unit(conv) + cfg.m * vcsels_per_unit(fc);
    return inv;
}

link::OpticalPath arm_path(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    const double banks_cm = bank_length_cm(unit, cfg);
    link::OpticalPath path;
    path.waveguide_length_cm = cfg.link.routing_length_cm + banks_cm;
    path.splits = unit.arms > 1 ? static_cast<std::size_t>(std::bit_width(unit.arms - 1)) : 0;
    path.combines = 1;
    path.modulating_mrs = unit.mrs_per_bank > 0 ? 2 : 0;
    path.through_mrs = 2 * unit.mrs_per_bank - path.modulating_mrs;
    path.eo_tuned_length_cm = banks_cm;
    path.to_tuned_length_cm = banks_cm;
    return path;
}

link::WavelengthGrid unit_grid(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    return link::WavelengthGrid::uniform(unit.wavelengths_per_arm, cfg.device.resonant_wavelength_nm,
                                         cfg.device.fsr_nm, cfg.device.q_factor);
}

int resolution_bits(const AcceleratorConfig& cfg) {
    const int cap = cfg.link.resolution_cap_bits;
    return std::min(link::grid_resolution(unit_grid(cfg.conv_unit(), cfg), cap).resolution_bits,
                    link::grid_resolution(unit_grid(cfg.fc_unit(), cfg), cap).resolution_bits);
}

double serialization_time(std::size_t op_length, const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    // Banks load in parallel, one DAC each; one ADC word reads the result.
    const std::size_t words = std::min(op_length, unit.mrs_per_bank) + 1;
    const double bits = static_cast<double>(words) * static_cast<double>(resolution_bits(cfg));
    return bits / (cfg.converter.rate_gbps * 1e9);
}

double issue_interval(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    return std::max(cfg.tuning.eo_latency_s, serialization_time(unit.vector_size, unit, cfg));
}

double op_latency(std::size_t op_length, const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg) {
    if (op_length == 0) {
        throw ContractViolation("op length must be >= 1");
    }
    if (op_length > unit.vector_size || op_length > unit.arms * unit.mrs_per_bank) {
        throw CapacityError("op of length " + std::to_string(op_length) + " does not fit a unit of size " +
                            std::to_string(unit.vector_size));
    }
    const std::size_t chunks = ceil_div(op_length, unit.mrs_per_bank);
    const double propagation =
        arm_path(unit, cfg).waveguide_length_cm * 1e-2 * cfg.perf.group_index / kSpeedOfLight;
    double t = cfg.tuning.eo_latency_s + propagation + cfg.aux.pd_latency_s + cfg.aux.tia_latency_s;
    if (chunks > 1) {
        // partial sums re-modulated by VCSELs and summed on one more PD
        t += cfg.aux.vcsel_latency_s + cfg.aux.pd_latency_s;
    }
    return t + serialization_time(op_length, unit, cfg);
}

double model_latency(const workload::ModelSpec& model, const std::vector<workload::DotProductSchedule>& schedules,
                     const AcceleratorConfig& cfg) {
    if (schedules.size() != model.layers.size()) {
        throw ContractViolation("one schedule per layer expected");
    }
    const auto conv = cfg.conv_unit();
    const auto fc = cfg.fc_unit();
    double total = 0.0;
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const auto& layer = model.layers[k];
        if (!layer.is_photonic()) {
            total += cfg.perf.electronic_layer_latency_s;
            continue;
        }
        const auto& schedule = schedules[k];
        if (schedule.ops.empty()) {
            continue;
        }
        const bool is_conv = layer.kind == workload::LayerKind::Conv;
        const auto& unit = is_conv ? conv : fc;
        const std::size_t units = is_conv ? cfg.n : cfg.m;
        std::size_t passes = 0;
        std::size_t longest = 0;
        for (const auto& op : schedule.ops) {
            passes += ceil_div(op.length, unit.vector_size);
            longest = std::max(longest, std::min(op.length, unit.vector_size));
        }
        const std::size_t rounds = ceil_div(passes, units);
        total += static_cast<double>(rounds - 1) * issue_interval(unit, cfg) + op_latency(longest, unit, cfg);
    }
    return total;
}

double model_latency(const workload::ModelSpec& model, const AcceleratorConfig& cfg) {
    return model_latency(model, workload::lower_model(model), cfg);
}

PowerBreakdown power_breakdown(const AcceleratorConfig& cfg, const devices::FPVSample& fpv) {
    cfg.validate();
    const Inventory inv = inventory(cfg);
    if (fpv.drifts_nm.size() != inv.mrs) {
        throw ContractViolation("FPV sample has " + std::to_string(fpv.drifts_nm.size()) + " drifts for " +
                                std::to_string(inv.mrs) + " MRs");
    }
    const auto conv = cfg.conv_unit();
    const auto fc = cfg.fc_unit();
    const double activity = cfg.perf.activity_factor;
    PowerBreakdown out;

    for (const auto& [unit, arms] : {std::pair{conv, inv.conv_arms}, std::pair{fc, inv.fc_arms}}) {
        const double loss = link::path_loss(arm_path(unit, cfg), cfg.losses);
        const auto laser = link::laser_power_required(loss, cfg.link.detector_sensitivity_dbm,
                                                      unit.wavelengths_per_arm, cfg.link.margin_db);
        out.laser_mw += static_cast<double>(arms) * laser.mw / cfg.link.laser_wall_plug_efficiency;

        // value imprint: mean EO shift of half a channel spacing per ring
        const double spacing = cfg.device.fsr_nm / static_cast<double>(unit.wavelengths_per_arm);
        const double rings = static_cast<double>(arms * 2 * unit.mrs_per_bank);
        out.eo_tuning_mw += activity * rings * 0.5 * spacing * cfg.tuning.eo_power_uw_per_nm * 1e-3;
    }

    const std::span<const double> drifts(fpv.drifts_nm);
    const std::size_t conv_mrs = cfg.n * conv.mr_count();
    compensate_fpv(conv, cfg.n, cfg, drifts.first(conv_mrs), out);
    compensate_fpv(fc, cfg.m, cfg, drifts.subspan(conv_mrs), out);

    out.pd_mw = activity * static_cast<double>(inv.pds) * cfg.aux.pd_power_mw;
    out.tia_mw = activity * static_cast<double>(inv.pds) * cfg.aux.tia_power_mw;
    out.vcsel_mw = activity * static_cast<double>(inv.vcsels) * cfg.aux.vcsel_power_mw;

    const double bits = resolution_bits(cfg);
    const double rate = cfg.converter.rate_gbps * 1e9;
    for (const auto& [unit, units] : {std::pair{conv, cfg.n}, std::pair{fc, cfg.m}}) {
        const double interval = issue_interval(unit, cfg);
        const double dac_util = std::min(1.0, static_cast<double>(unit.mrs_per_bank) * bits / interval / rate);
        const double adc_util = std::min(1.0, bits / interval / rate);
        const double dacs = static_cast<double>(units * unit.arms * 2);
        const double adcs = static_cast<double>(units * pds_per_unit(unit));
        out.converters_mw += activity * cfg.converter.power_mw * (dacs * dac_util + adcs * adc_util);
    }
    return out;
}

PowerBreakdown power_breakdown(const AcceleratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    return power_breakdown(cfg, devices::sample_fpv_drift(inventory(cfg).mrs, cfg.effective_device(), seed));
}

double total_bits(std::size_t total_macs, int bits) {
    return 2.0 * static_cast<double>(total_macs) * static_cast<double>(bits);
}

double energy_epb(double total_power_mw, double latency_s, double bits) {
    if (!(bits > 0.0)) {
        throw ContractViolation("energy per bit needs a model with at least one operand bit");
    }
    return total_power_mw * 1e-3 * latency_s / bits * 1e12;
}

double energy_epb(const workload::ModelSpec& model, const AcceleratorConfig& cfg, double total_power_mw) {
    const auto schedules = workload::lower_model(model);
    std::size_t macs = 0;
    for (const auto& s : schedules) {
        macs += s.total_macs();
    }
    return energy_epb(total_power_mw, model_latency(model, schedules, cfg), total_bits(macs, resolution_bits(cfg)));
}

double area_estimate(const AcceleratorConfig& cfg) {
    const Inventory inv = inventory(cfg);
    const double pitch_mm = cfg.thermal.mr_pitch_um * 1e-3;
    const double raw = static_cast<double>(inv.mrs) * pitch_mm * pitch_mm +
                       static_cast<double>(inv.pds) * cfg.area.pd_mm2 +
                       static_cast<double>(inv.vcsels) * cfg.area.vcsel_mm2 +
                       static_cast<double>(inv.banks + inv.pds) * cfg.area.converter_mm2;
    return raw * cfg.area.routing_factor;
}

MetricsReport evaluate(const workload::ModelSpec& model, const std::vector<workload::DotProductSchedule>& schedules,
                       const AcceleratorConfig& cfg, const PowerBreakdown& power) {
    MetricsReport r;
    r.latency_s = model_latency(model, schedules, cfg);
    r.fps = 1.0 / r.latency_s;
    r.power = power;
    r.total_power_mw = power.total_mw();
    r.resolution_bits = resolution_bits(cfg);
    std::size_t macs = 0;
    for (const auto& s : schedules) {
        macs += s.total_macs();
    }
    r.energy_per_bit_pj = energy_epb(r.total_power_mw, r.latency_s, total_bits(macs, r.resolution_bits));
    r.kfps_per_watt = r.fps / (r.total_power_mw * 1e-3) / 1e3;
    r.area_mm2 = area_estimate(cfg);
    return r;
}

MetricsReport evaluate(const workload::ModelSpec& model, const AcceleratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    return evaluate(model, workload::lower_model(model), cfg, power_breakdown(cfg, seed));
}

}  // namespace photosim::perf
