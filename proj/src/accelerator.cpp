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

#include "photosim/accelerator.hpp"

#include <cmath>
#include <string>

#include "photosim/error.hpp"

namespace photosim {

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) {
        throw ValidationError(field + " must satisfy " + rule);
    }
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

devices::MRDeviceSpec AcceleratorConfig::effective_device() const {
    devices::MRDeviceSpec d = device;
    d.fpv_drift_sigma_nm = optimized_mr ? fpv.optimized_sigma_nm : fpv.conventional_sigma_nm;
    return d;
}

void AcceleratorConfig::validate() const {
    require(N >= 1, "architecture.N", ">= 1");
    require(K >= 1, "architecture.K", ">= 1");
    require(n >= 1, "architecture.n", ">= 1");
    require(m >= 1, "architecture.m", ">= 1");
    require(n > m, "architecture.n", "n > m (more CONV units than FC units)");
    require(K > N, "architecture.K", "K > N (FC units wider than CONV units)");
    if (mrs_per_bank < 1 || mrs_per_bank > vdp::kMaxMrsPerBank) {
        throw ValidationError("architecture.mrs_per_bank must be in [1, 15]: at most 15 MRs per bank (got " +
                              std::to_string(mrs_per_bank) + ")");
    }
    conv_unit().validate();
    fc_unit().validate();

    device.validate();
    effective_device().validate();
    tuning.validate();
    thermal.validate();
    require(thermal.ratio_at_zero < 1.0, "thermal.ratio_at_zero", "< 1 for a solvable crosstalk system");
    losses.validate();

    require(std::isfinite(link.detector_sensitivity_dbm), "link.detector_sensitivity_dbm", "finite");
    require(finite_nonneg(link.margin_db), "link.margin_db", ">= 0");
    require(finite_pos(link.laser_wall_plug_efficiency) && link.laser_wall_plug_efficiency <= 1.0,
            "link.laser_wall_plug_efficiency", "0 < x <= 1");
    require(finite_nonneg(link.routing_length_cm), "link.routing_length_cm", ">= 0");
    require(link.resolution_cap_bits >= 1 && link.resolution_cap_bits <= 32, "link.resolution_cap_bits",
            "1 <= x <= 32");

    require(finite_pos(converter.rate_gbps), "converter.rate_gbps", "> 0");
    require(finite_nonneg(converter.power_mw), "converter.power_mw", ">= 0");

    require(finite_nonneg(aux.vcsel_latency_s), "aux.vcsel_latency_s", ">= 0");
    require(finite_nonneg(aux.vcsel_power_mw), "aux.vcsel_power_mw", ">= 0");
    require(finite_nonneg(aux.tia_latency_s), "aux.tia_latency_s", ">= 0");
    require(finite_nonneg(aux.tia_power_mw), "aux.tia_power_mw", ">= 0");
    require(finite_nonneg(aux.pd_latency_s), "aux.pd_latency_s", ">= 0");
    require(finite_nonneg(aux.pd_power_mw), "aux.pd_power_mw", ">= 0");

    require(finite_nonneg(fpv.conventional_sigma_nm), "fpv.conventional_sigma_nm", ">= 0");
    require(finite_nonneg(fpv.optimized_sigma_nm), "fpv.optimized_sigma_nm", ">= 0");

    require(finite_pos(solver.condition_bound), "solver.condition_bound", "> 0");
    require(solver.naive_max_iterations >= 1, "solver.naive_max_iterations", ">= 1");
    require(finite_pos(solver.naive_tolerance), "solver.naive_tolerance", "> 0");

    require(finite_nonneg(area.pd_mm2), "area.pd_mm2", ">= 0");
    require(finite_nonneg(area.vcsel_mm2), "area.vcsel_mm2", ">= 0");
    require(finite_nonneg(area.converter_mm2), "area.converter_mm2", ">= 0");
    require(finite_pos(area.routing_factor), "area.routing_factor", "> 0");

    require(finite_nonneg(perf.activity_factor) && perf.activity_factor <= 1.0, "perf.activity_factor",
            "0 <= x <= 1");
    require(finite_nonneg(perf.electronic_layer_latency_s), "perf.electronic_layer_latency_s", ">= 0");
    require(finite_nonneg(perf.group_index), "perf.group_index", ">= 0");
}

}  // namespace photosim
