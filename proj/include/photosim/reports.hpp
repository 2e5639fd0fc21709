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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "photosim/config_io.hpp"
#include "photosim/dse.hpp"
#include "photosim/perf_models.hpp"

namespace photosim::reports {

inline constexpr const char* kVersion = "0.1.0";

struct Provenance {
    std::string version = kVersion;
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(const std::string& data);

/// Hash of every parameter that can change a result.
Provenance provenance_of(const config::RunConfig& cfg);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct InferenceOutcome {
    std::vector<double> outputs;
    std::size_t predicted = 0;
};

std::string metrics_json(const Provenance& prov, const std::string& model_name, const dse::ConfigKey& key,
                         const perf::MetricsReport& metrics, const std::optional<InferenceOutcome>& inference);
std::string metrics_csv(const Provenance& prov, const std::string& model_name, const dse::ConfigKey& key,
                        const perf::MetricsReport& metrics);

std::string sweep_csv(const Provenance& prov, const dse::SweepResult& result);
/// `best` is null when no configuration fits the area cap.
std::string best_json(const Provenance& prov, const dse::SweepResult& result, const dse::SweepPoint* best);

struct ResolutionRow {
    std::size_t channels = 0;
    double spacing_nm = 0.0;
    double max_noise_power = 0.0;
    double resolution_levels = 0.0;
    int resolution_bits = 0;
};

inline constexpr int kClaimedResolutionBits = 16;

std::string resolution_csv(const Provenance& prov, const std::vector<ResolutionRow>& rows);

struct TedRow {
    double pitch_um = 0.0;
    double ted_power_mw = 0.0;
    std::optional<double> naive_power_mw;  // empty when the iteration diverged
    std::size_t naive_iterations = 0;
    double condition = 0.0;
};

std::string ted_csv(const Provenance& prov, const std::vector<TedRow>& rows);

std::string compare_csv(const Provenance& prov, const dse::VariantTable& table);

}  // namespace photosim::reports
