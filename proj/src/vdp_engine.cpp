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

#include "photosim/vdp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "photosim/accelerator.hpp"
#include "photosim/error.hpp"
#include "photosim/rng.hpp"

namespace photosim::vdp {

using workload::LayerKind;
using workload::LayerSpec;

VDPUnitConfig VDPUnitConfig::for_vector(std::size_t vector_size, std::size_t max_mrs_per_bank) {
    if (vector_size == 0) {
        throw ValidationError("unit vector_size must be >= 1");
    }
    if (max_mrs_per_bank == 0 || max_mrs_per_bank > kMaxMrsPerBank) {
        throw ValidationError("architecture.mrs_per_bank must be in [1, 15] (at most 15 MRs per bank, got " +
                              std::to_string(max_mrs_per_bank) + ")");
    }
    VDPUnitConfig unit;
    unit.vector_size = vector_size;
    unit.mrs_per_bank = std::min(vector_size, max_mrs_per_bank);
    unit.arms = (vector_size + unit.mrs_per_bank - 1) / unit.mrs_per_bank;
    unit.wavelengths_per_arm = unit.mrs_per_bank;
    return unit;
}

void VDPUnitConfig::validate() const {
    if (mrs_per_bank < 1 || mrs_per_bank > kMaxMrsPerBank) {
        throw ValidationError("unit.mrs_per_bank must be in [1, 15] (at most 15 MRs per bank)");
    }
    if (arms < 1) {
        throw ValidationError("unit.arms must be >= 1");
    }
    if (vector_size < 1 || vector_size > arms * mrs_per_bank) {
        throw ValidationError("unit.vector_size must be in [1, arms * mrs_per_bank]");
    }
    if (wavelengths_per_arm < mrs_per_bank) {
        throw ValidationError("unit.wavelengths_per_arm must cover one bank");
    }
}

double QuantizationSpec::step() const { return range / std::ldexp(1.0, bits - 1); }

void QuantizationSpec::validate() const {
    if (bits < 1 || bits > 16) {
        throw ContractViolation("quantization bits must be in [1, 16], got " + std::to_string(bits));
    }
    if (!(range >= 0.0) || !std::isfinite(range)) {
        throw ContractViolation("quantization range must be finite and >= 0");
    }
}

double quantize(double value, const QuantizationSpec& spec) {
    spec.validate();
    if (!std::isfinite(value)) {
        throw ContractViolation("cannot quantize a non-finite value");
    }
    if (spec.range == 0.0) {
        return 0.0;
    }
    const double clamped = std::clamp(value, -spec.range, spec.range);
    const double step = spec.step();
    return std::round(clamped / step) * step;
}

double execute_op(std::span<const double> weights, std::span<const double> activations, const VDPUnitConfig& unit,
                  const ExecOptions& options) {
    if (weights.size() != activations.size()) {
        throw ContractViolation("weight vector has " + std::to_string(weights.size()) + " elements, activations " +
                                std::to_string(activations.size()));
    }
    if (weights.size() > unit.vector_size) {
        throw CapacityError("dot product of length " + std::to_string(weights.size()) + " exceeds unit size " +
                            std::to_string(unit.vector_size));
    }
    const double max_noise = options.max_noise.value_or(0.0);
    if (!(max_noise >= 0.0)) {
        throw ContractViolation("max_noise must be >= 0");
    }
    const bool noisy = max_noise > 0.0;
    Rng rng(options.seed);

    const std::size_t chunk = unit.chunk_size();
    double total = 0.0;
    for (std::size_t begin = 0; begin < weights.size(); begin += chunk) {
        const std::size_t end = std::min(begin + chunk, weights.size());
        // One arm: the photodetector sums its wavelengths.
        double partial = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            const double w = options.weight_quant ? quantize(weights[k], *options.weight_quant) : weights[k];
            const double a =
                options.activation_quant ? quantize(activations[k], *options.activation_quant) : activations[k];
            double product = w * a;
            if (noisy) {
                product *= 1.0 + rng.uniform(-max_noise, max_noise);
            }
            partial += product;
        }
        total += partial;
    }
    return total;
}

namespace {

double max_abs(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

struct LayerContext {
    const VDPUnitConfig* unit;
    ExecOptions base;  // quantizers for this layer; seed set per op
    std::uint64_t seed;
    std::size_t layer_index;
};

// A dot product of any length: unit-sized passes summed electronically.
double run_dot(std::span<const double> w, std::span<const double> a, const LayerContext& ctx, std::size_t op_index) {
    const std::size_t pass = ctx.unit->vector_size;
    ExecOptions opts = ctx.base;
    double total = 0.0;
    std::size_t pass_index = 0;
    for (std::size_t begin = 0; begin < w.size(); begin += pass, ++pass_index) {
        const std::size_t len = std::min(pass, w.size() - begin);
        opts.seed = derive_seed(ctx.seed, ctx.layer_index, (static_cast<std::uint64_t>(op_index) << 20) ^ pass_index);
        total += execute_op(w.subspan(begin, len), a.subspan(begin, len), *ctx.unit, opts);
    }
    return total;
}

std::vector<double> run_conv(const LayerSpec& l, const workload::LayerWeights& lw, std::span<const double> in,
                             const LayerContext& ctx) {
    const std::size_t oh = l.out_h(), ow = l.out_w();
    const std::size_t patch = l.kernel_h * l.kernel_w * l.in_channels;
    std::vector<double> out(l.out_channels * oh * ow, 0.0);
    std::vector<double> column(patch);
    std::size_t op_index = 0;
    for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
        const std::span<const double> kernel(lw.weights.data() + oc * patch, patch);
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x, ++op_index) {
                // im2col in [in][kh][kw] order to match the kernel layout
                std::size_t k = 0;
                for (std::size_t c = 0; c < l.in_channels; ++c) {
                    for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
                        const std::size_t row = (c * l.input_h + y * l.stride + ky) * l.input_w + x * l.stride;
                        for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
                            column[k++] = in[row + kx];
                        }
                    }
                }
                double v = run_dot(kernel, column, ctx, op_index);
                if (l.bias) {
                    v += lw.bias[oc];
                }
                out[(oc * oh + y) * ow + x] = v;
            }
        }
    }
    return out;
}

std::vector<double> run_fc(const LayerSpec& l, const workload::LayerWeights& lw, std::span<const double> in,
                           const LayerContext& ctx) {
    std::vector<double> out(l.out_features);
    for (std::size_t o = 0; o < l.out_features; ++o) {
        const std::span<const double> row(lw.weights.data() + o * l.in_features, l.in_features);
        out[o] = run_dot(row, in, ctx, o) + (l.bias ? lw.bias[o] : 0.0);
    }
    return out;
}

std::vector<double> run_pool(const LayerSpec& l, std::span<const double> in) {
    const std::size_t oh = l.out_h(), ow = l.out_w();
    std::vector<double> out(l.in_channels * oh * ow);
    for (std::size_t c = 0; c < l.in_channels; ++c) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double m = -std::numeric_limits<double>::infinity();
                for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
                    for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
                        m = std::max(m, in[(c * l.input_h + y * l.stride + ky) * l.input_w + x * l.stride + kx]);
                    }
                }
                out[(c * oh + y) * ow + x] = m;
            }
        }
    }
    return out;
}

std::vector<double> run_batchnorm(const LayerSpec& l, const workload::LayerWeights& lw, std::span<const double> in) {
    const std::size_t plane = l.input_h * l.input_w;
    std::vector<double> out(in.begin(), in.end());
    for (std::size_t c = 0; c < l.in_channels; ++c) {
        for (std::size_t p = 0; p < plane; ++p) {
            out[c * plane + p] = lw.weights[c] * out[c * plane + p] + lw.bias[c];
        }
    }
    return out;
}

}  // namespace

std::vector<double> execute_model(const workload::ModelSpec& model, const workload::ModelWeights& weights,
                                  std::span<const double> input, const AcceleratorConfig& config,
                                  const InferenceOptions& options) {
    model.validate();
    if (weights.layers.size() != model.layers.size()) {
        throw LoweringError("model '" + model.name + "': weights cover " + std::to_string(weights.layers.size()) +
                            " layers, model has " + std::to_string(model.layers.size()));
    }
    if (input.size() != model.input.size()) {
        throw LoweringError("model '" + model.name + "': input has " + std::to_string(input.size()) +
                            " values, expected " + std::to_string(model.input.size()));
    }
    if (options.bits) {
        QuantizationSpec{*options.bits, 1.0}.validate();
    }
    const VDPUnitConfig conv_unit = config.conv_unit();
    const VDPUnitConfig fc_unit = config.fc_unit();

    std::vector<double> current(input.begin(), input.end());
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const LayerSpec& layer = model.layers[k];
        const workload::LayerWeights& lw = weights.layers[k];
        if (lw.weights.size() + lw.bias.size() != layer.parameter_count()) {
            throw LoweringError("model '" + model.name + "' layer " + std::to_string(k) + ": parameter count mismatch");
        }
        switch (layer.kind) {
            case LayerKind::Conv:
            case LayerKind::FC: {
                LayerContext ctx{layer.kind == LayerKind::Conv ? &conv_unit : &fc_unit, {}, options.seed, k};
                ctx.base.max_noise = options.max_noise;
                if (options.bits) {
                    ctx.base.weight_quant = QuantizationSpec{*options.bits, max_abs(lw.weights)};
                    ctx.base.activation_quant = QuantizationSpec{*options.bits, max_abs(current)};
                }
                current = layer.kind == LayerKind::Conv ? run_conv(layer, lw, current, ctx)
                                                        : run_fc(layer, lw, current, ctx);
                if (k + 1 < model.layers.size()) {
                    for (double& v : current) {
                        v = std::max(v, 0.0);
                    }
                }
                break;
            }
            case LayerKind::Pool: current = run_pool(layer, current); break;
            case LayerKind::BatchNorm: current = run_batchnorm(layer, lw, current); break;
        }
    }
    return current;
}

}  // namespace photosim::vdp
