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
#include <span>
#include <vector>

#include "photosim/workload.hpp"

namespace photosim {
struct AcceleratorConfig;
}

namespace photosim::vdp {

inline constexpr std::size_t kMaxMrsPerBank = 15;

/// Shape of one vector-dot-product unit. Each arm carries an activation bank
/// and a weight bank of `mrs_per_bank` rings each; wavelengths are reused
/// across arms.
struct VDPUnitConfig {
    std::size_t vector_size = 15;
    std::size_t mrs_per_bank = 15;
    std::size_t arms = 1;
    std::size_t wavelengths_per_arm = 15;

    std::size_t chunk_size() const { return mrs_per_bank; }
    std::size_t mr_count() const { return 2 * mrs_per_bank * arms; }

    /// Smallest unit of `vector_size` elements with at most `max_mrs_per_bank`
    /// rings per bank.
    static VDPUnitConfig for_vector(std::size_t vector_size, std::size_t max_mrs_per_bank = kMaxMrsPerBank);

    void validate() const;

    friend bool operator==(const VDPUnitConfig&, const VDPUnitConfig&) = default;
};

/// Symmetric uniform quantizer over [-range, +range].
///
/// The grid has step range / 2^(bits-1) and includes zero and both end
/// points, so 1 bit gives {-range, 0, +range}. Rounding is to nearest, ties
/// away from zero; inputs outside the range clamp.
struct QuantizationSpec {
    int bits = 8;
    double range = 1.0;

    double step() const;
    void validate() const;

    friend bool operator==(const QuantizationSpec&, const QuantizationSpec&) = default;
};

double quantize(double value, const QuantizationSpec& spec);

struct ExecOptions {
    std::optional<QuantizationSpec> weight_quant;
    std::optional<QuantizationSpec> activation_quant;
    /// Bound of the multiplicative uniform perturbation on each product.
    std::optional<double> max_noise;
    std::uint64_t seed = 0;
};

/// One dot product on one unit: chunked over banks, optionally quantized and
/// noise-perturbed, with chunk partial sums accumulated at the end.
double execute_op(std::span<const double> weights, std::span<const double> activations, const VDPUnitConfig& unit,
                  const ExecOptions& options = {});

struct InferenceOptions {
    /// Quantize weights and activations per tensor (max-abs range) when set.
    std::optional<int> bits;
    std::optional<double> max_noise;
    std::uint64_t seed = 0;
};

/// Runs a whole model: CONV ops on the N-sized unit, FC ops on the K-sized
/// unit, dot products longer than the unit split into unit-sized passes whose
/// results are summed electronically. ReLU follows every CONV/FC layer except
/// the last layer of the model. Input and output are flat channel-major.
std::vector<double> execute_model(const workload::ModelSpec& model, const workload::ModelWeights& weights,
                                  std::span<const double> input, const AcceleratorConfig& config,
                                  const InferenceOptions& options = {});

}  // namespace photosim::vdp
