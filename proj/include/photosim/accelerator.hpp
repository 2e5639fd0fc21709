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

#include "photosim/devices.hpp"
#include "photosim/link_budget.hpp"
#include "photosim/vdp_engine.hpp"

namespace photosim {

struct LinkSpec {
    double detector_sensitivity_dbm = -20.0;
    double margin_db = 0.0;
    double laser_wall_plug_efficiency = 1.0;
    /// Laser-to-arm routing before the first bank.
    double routing_length_cm = 0.5;
    int resolution_cap_bits = link::kDefaultResolutionCapBits;

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct ConverterSpec {
    double rate_gbps = 56.0;
    /// Draw of one DAC or ADC at full rate; pro-rated by utilization.
    double power_mw = 250.0;

    friend bool operator==(const ConverterSpec&, const ConverterSpec&) = default;
};

// VCSEL, TIA and photodetector figures.
struct AuxDeviceSpec {
    double vcsel_latency_s = 10e-9;
    double vcsel_power_mw = 0.66;
    double tia_latency_s = 0.15e-9;
    double tia_power_mw = 7.2;
    double pd_latency_s = 5.8e-12;
    double pd_power_mw = 2.8;

    friend bool operator==(const AuxDeviceSpec&, const AuxDeviceSpec&) = default;
};

struct FpvSpec {
    double conventional_sigma_nm = 7.1;
    double optimized_sigma_nm = 2.1;

    friend bool operator==(const FpvSpec&, const FpvSpec&) = default;
};

struct SolverSpec {
    double condition_bound = 1e12;
    std::size_t naive_max_iterations = 10000;
    double naive_tolerance = 1e-12;

    friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

/// Footprints used by the area estimate. Calibrated once against the
/// reference (20, 150, 100, 60) configuration, then frozen.
struct AreaSpec {
    double pd_mm2 = 0.0005;
    double vcsel_mm2 = 0.001;
    double converter_mm2 = 0.006;
    double routing_factor = 1.2;

    friend bool operator==(const AreaSpec&, const AreaSpec&) = default;
};

struct PerfSpec {
    double activity_factor = 1.0;
    /// Fixed latency charged for each pooling / batch-norm layer.
    double electronic_layer_latency_s = 0.0;
    double group_index = 4.2;

    friend bool operator==(const PerfSpec&, const PerfSpec&) = default;
};

/// Whole-accelerator description: n CONV units of vector size N, m FC units
/// of vector size K, plus every device parameter set.
struct AcceleratorConfig {
    std::size_t N = 20;
    std::size_t K = 150;
    std::size_t n = 100;
    std::size_t m = 60;
    std::size_t mrs_per_bank = vdp::kMaxMrsPerBank;
    bool optimized_mr = true;
    bool ted_enabled = true;

    devices::MRDeviceSpec device;
    devices::TuningSpec tuning;
    devices::ThermalCrosstalkSpec thermal;
    link::LossSpec losses;
    LinkSpec link;
    ConverterSpec converter;
    AuxDeviceSpec aux;
    FpvSpec fpv;
    SolverSpec solver;
    AreaSpec area;
    PerfSpec perf;

    vdp::VDPUnitConfig conv_unit() const { return vdp::VDPUnitConfig::for_vector(N, mrs_per_bank); }
    vdp::VDPUnitConfig fc_unit() const { return vdp::VDPUnitConfig::for_vector(K, mrs_per_bank); }

    /// Device spec with the drift sigma the `optimized_mr` flag selects.
    devices::MRDeviceSpec effective_device() const;

    /// Every parameter invariant; throws ValidationError naming the field.
    void validate() const;

    friend bool operator==(const AcceleratorConfig&, const AcceleratorConfig&) = default;
};

}  // namespace photosim
