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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "photosim/accelerator.hpp"
#include "photosim/dse.hpp"

namespace photosim::config {

struct InferenceSpec {
    int bits = 8;
    double max_noise = 0.0;

    friend bool operator==(const InferenceSpec&, const InferenceSpec&) = default;
};

struct RunConfig {
    AcceleratorConfig accel;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    /// Model description paths, resolved against the config file's directory.
    std::vector<std::string> models;
    InferenceSpec inference;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Reads a run configuration. Omitted parameters keep their defaults; unknown
/// keys, wrong types and violated invariants are rejected with the key path.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Effective configuration as TOML; parse_config_string(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

/// Accelerator parameters only, in emit order; used for provenance hashing.
std::string emit_accelerator(const AcceleratorConfig& cfg);

/// Applies PHOTOSIM_SEED when set. Throws ValidationError on a malformed value.
void apply_env_overrides(RunConfig& cfg);

dse::SweepGrid parse_grid(const std::filesystem::path& path);
dse::SweepGrid parse_grid_string(const std::string& text);

}  // namespace photosim::config
