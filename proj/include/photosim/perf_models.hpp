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
#include <vector>

#include "photosim/accelerator.hpp"
#include "photosim/devices.hpp"
#include "photosim/link_budget.hpp"
#include "photosim/workload.hpp"

namespace photosim::perf {

/// Peak electrical power by consumer, in mW.
struct PowerBreakdown {
    double laser_mw = 0.0;
    double to_tuning_mw = 0.0;
    double eo_tuning_mw = 0.0;
    double pd_mw = 0.0;
    double tia_mw = 0.0;
    double vcsel_mw = 0.0;
    double converters_mw = 0.0;

    double total_mw() const {
        return laser_mw + to_tuning_mw + eo_tuning_mw + pd_mw + tia_mw + vcsel_mw + converters_mw;
    }
};

struct MetricsReport {
    double latency_s = 0.0;
    double fps = 0.0;
    PowerBreakdown power;
    double total_power_mw = 0.0;
    double energy_per_bit_pj = 0.0;
    double kfps_per_watt = 0.0;
    double area_mm2 = 0.0;
    int resolution_bits = 0;
};

/// Device counts of a configuration, shared by the power and area models.
struct Inventory {
    std::size_t conv_arms = 0;
    std::size_t fc_arms = 0;
    std::size_t mrs = 0;
    std::size_t banks = 0;  // one DAC each
    std::size_t pds = 0;    // one TIA and one ADC each
    std::size_t vcsels = 0;
};

Inventory inventory(const AcceleratorConfig& cfg);

/// Path one wavelength follows through an arm of `unit`: routing, the split
/// tree across arms, the combiner, then both banks.
link::OpticalPath arm_path(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg);

/// Bank wavelengths spread evenly over one FSR.
link::WavelengthGrid unit_grid(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg);

/// Crosstalk-limited resolution in bits; the worse of the CONV and FC units.
int resolution_bits(const AcceleratorConfig& cfg);

/// Time to serialize one op's operand and result words through the converters.
double serialization_time(std::size_t op_length, const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg);

/// Spacing between op launches on one unit under full pipelining.
double issue_interval(const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg);

/// Latency of one op that fits the unit (length <= vector_size).
double op_latency(std::size_t op_length, const vdp::VDPUnitConfig& unit, const AcceleratorConfig& cfg);

/// Layers run back to back; within a layer the ops (split into unit-sized
/// passes) are spread over the units of that kind in rounds.
double model_latency(const workload::ModelSpec& model, const AcceleratorConfig& cfg);
double model_latency(const workload::ModelSpec& model, const std::vector<workload::DotProductSchedule>& schedules,
                     const AcceleratorConfig& cfg);

/// Peak power of the configuration. `fpv` holds one drift per MR, bank by
/// bank (CONV units first); its length must equal inventory(cfg).mrs.
PowerBreakdown power_breakdown(const AcceleratorConfig& cfg, const devices::FPVSample& fpv);

/// Samples the drifts with the variant's sigma from `seed`.
PowerBreakdown power_breakdown(const AcceleratorConfig& cfg, std::uint64_t seed);

/// Bits processed per inference: every MAC operand pair at `bits` each.
double total_bits(std::size_t total_macs, int bits);

/// Energy per bit in pJ.
double energy_epb(double total_power_mw, double latency_s, double bits);
double energy_epb(const workload::ModelSpec& model, const AcceleratorConfig& cfg, double total_power_mw);

double area_estimate(const AcceleratorConfig& cfg);

/// Full evaluation of one (model, config) pair.
MetricsReport evaluate(const workload::ModelSpec& model, const AcceleratorConfig& cfg, std::uint64_t seed);
MetricsReport evaluate(const workload::ModelSpec& model, const std::vector<workload::DotProductSchedule>& schedules,
                       const AcceleratorConfig& cfg, const PowerBreakdown& power);

}  // namespace photosim::perf
