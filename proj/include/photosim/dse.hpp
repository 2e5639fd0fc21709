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
#include <optional>
#include <string>
#include <vector>

#include "photosim/accelerator.hpp"
#include "photosim/perf_models.hpp"
#include "photosim/workload.hpp"

namespace photosim::dse {

struct VariantFlags {
    bool optimized_mr = true;
    bool ted_enabled = true;

    friend auto operator<=>(const VariantFlags&, const VariantFlags&) = default;
};

/// "base", "base_ted", "opt" or "opt_ted".
std::string variant_name(const VariantFlags& flags);
VariantFlags parse_variant(const std::string& name);

/// (N, K, n, m) plus variant flags: what a sweep varies.
struct ConfigKey {
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    VariantFlags flags;

    friend auto operator<=>(const ConfigKey&, const ConfigKey&) = default;
};

ConfigKey key_of(const AcceleratorConfig& cfg);
AcceleratorConfig apply(const AcceleratorConfig& base, const ConfigKey& key);

struct SweepGrid {
    std::vector<std::size_t> N;
    std::vector<std::size_t> K;
    std::vector<std::size_t> n;
    std::vector<std::size_t> m;
    /// Empty means "the template's flags".
    std::vector<VariantFlags> variants;
    std::optional<double> area_cap_mm2;
};

struct SweepPoint {
    ConfigKey key;
    double avg_fps = 0.0;
    double avg_epb_pj = 0.0;
    double avg_latency_s = 0.0;
    double avg_power_mw = 0.0;
    double area_mm2 = 0.0;
    int resolution_bits = 0;
    bool over_area_cap = false;
    bool pareto = false;  // not dominated in (FPS up, EPB down, area down)
    std::vector<perf::MetricsReport> per_model;

    double objective() const { return avg_fps / avg_epb_pj; }
};

struct SkippedConfig {
    ConfigKey key;
    std::string reason;
};

/// Points sorted by key; identical for any grid order or worker count.
struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<SkippedConfig> skipped;
    std::optional<double> area_cap_mm2;
};

struct NamedModel {
    workload::ModelSpec spec;
    std::vector<workload::DotProductSchedule> schedules;

    explicit NamedModel(workload::ModelSpec model);
};

/// Every configuration is evaluated with the same base `seed`, so FPV noise
/// cannot reorder configurations between runs. `jobs` bounds worker threads.
SweepResult sweep(const SweepGrid& grid, const std::vector<workload::ModelSpec>& models,
                  const AcceleratorConfig& base, std::uint64_t seed, std::size_t jobs = 1);

/// Arithmetic means over models for one configuration.
SweepPoint evaluate_point(const AcceleratorConfig& cfg, const std::vector<NamedModel>& models, std::uint64_t seed);

/// Highest FPS/EPB within the area cap; ties go to higher FPS, then the
/// smaller (N, K, n, m, flags) key.
const SweepPoint& select_best(const SweepResult& result);

struct VariantRow {
    std::string name;
    VariantFlags flags;
    double power_mw = 0.0;
    double to_tuning_mw = 0.0;
    double epb_pj = 0.0;
    double kfps_per_watt = 0.0;
    double fps = 0.0;
};

/// Published figures for other accelerators, carried into reports for context.
struct ReferenceRow {
    std::string name;
    double epb_pj;
    double kfps_per_watt;
};

const std::vector<ReferenceRow>& reference_rows();

struct VariantTable {
    std::vector<VariantRow> rows;  // base, base_ted, opt, opt_ted
    std::size_t seeds = 0;
};

/// The four {optimized_mr, ted_enabled} variants of `base`, each averaged over
/// the models and over `seeds` FPV draws (seed, seed + 1, ...).
VariantTable compare_variants(const std::vector<workload::ModelSpec>& models, const AcceleratorConfig& base,
                              std::size_t seeds, std::uint64_t seed);

}  // namespace photosim::dse
