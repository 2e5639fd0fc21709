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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace photosim::workload {

enum class LayerKind { Conv, FC, Pool, BatchNorm };

std::string_view to_string(LayerKind kind);

/// Channel-major activation shape. FC activations are {features, 1, 1}.
struct TensorShape {
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t size() const { return channels * height * width; }
    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

/// One model layer with fully resolved shapes.
///
/// Conv and Pool use the kernel/stride/input fields; FC uses in/out features;
/// BatchNorm uses in_channels and the input plane. Convolutions are "valid"
/// (unpadded) and the window must tile the input exactly.
struct LayerSpec {
    LayerKind kind = LayerKind::FC;
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t stride = 1;
    std::size_t input_h = 1;
    std::size_t input_w = 1;
    std::size_t in_features = 1;
    std::size_t out_features = 1;
    bool bias = false;

    static LayerSpec conv(std::size_t kernel_h, std::size_t kernel_w, std::size_t in_channels,
                          std::size_t out_channels, std::size_t stride, std::size_t input_h, std::size_t input_w,
                          bool bias = false);
    static LayerSpec fc(std::size_t in_features, std::size_t out_features, bool bias = false);
    static LayerSpec pool(std::size_t kernel, std::size_t stride, std::size_t channels, std::size_t input_h,
                          std::size_t input_w);
    static LayerSpec batchnorm(std::size_t channels, std::size_t input_h, std::size_t input_w);

    std::size_t out_h() const;
    std::size_t out_w() const;
    TensorShape input_shape() const;
    TensorShape output_shape() const;

    /// Multiply-accumulates performed by the photonic units (0 for Pool/BatchNorm).
    std::size_t mac_count() const;

    /// Float32 values this layer consumes from a weights file.
    std::size_t parameter_count() const;

    bool is_photonic() const { return kind == LayerKind::Conv || kind == LayerKind::FC; }

    void validate() const;
};

struct ModelSpec {
    std::string name;
    TensorShape input;
    std::vector<LayerSpec> layers;
    std::optional<std::filesystem::path> weights_path;

    TensorShape output_shape() const;
    std::size_t parameter_count() const;

    /// Checks each layer and that layer k's output feeds layer k+1 (FC after a
    /// spatial layer sees the flattened tensor).
    void validate() const;
};

/// Per-layer parameters in the weights-file order.
struct LayerWeights {
    std::vector<double> weights;  // conv: [out][in][kh][kw], fc: [out][in], bn: scale[C]
    std::vector<double> bias;     // conv/fc: [out] when enabled, bn: shift[C]
};

struct ModelWeights {
    std::vector<LayerWeights> layers;
};

/// Reads a model description. Layer shapes not given explicitly are inferred
/// from the previous layer; a relative weights path resolves against the
/// model file's directory.
ModelSpec load_model(const std::filesystem::path& path);
ModelSpec model_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json model_to_json(const ModelSpec& model);

/// Little-endian float32, layers concatenated in model order.
ModelWeights load_weights(const ModelSpec& model, const std::filesystem::path& path);
ModelWeights load_weights(const ModelSpec& model);
void save_weights(const ModelSpec& model, const ModelWeights& weights, const std::filesystem::path& path);

struct DotProductOp {
    std::size_t length = 0;
    std::size_t layer_index = 0;
    LayerKind role = LayerKind::FC;

    friend bool operator==(const DotProductOp&, const DotProductOp&) = default;
};

/// Flat list of dot products a layer lowers to. Ops are ordered output
/// channel major, then output row, then output column.
struct DotProductSchedule {
    std::vector<DotProductOp> ops;

    std::size_t op_count() const { return ops.size(); }
    std::size_t total_macs() const;
    /// Chunks needed across the whole schedule at `chunk_size` elements per chunk.
    std::size_t total_chunks(std::size_t chunk_size) const;
    /// Partial-sum accumulation passes across the whole schedule.
    std::size_t total_accumulations(std::size_t chunk_size) const;

    friend bool operator==(const DotProductSchedule&, const DotProductSchedule&) = default;
};

struct Decomposition {
    std::size_t chunk_count = 0;
    std::size_t tail_length = 0;  // 0 when every chunk is full
    std::size_t accumulation_stages = 0;
};

DotProductSchedule conv_to_schedule(const LayerSpec& layer, std::size_t layer_index = 0);
DotProductSchedule fc_to_schedule(const LayerSpec& layer, std::size_t layer_index = 0);

/// Any kind; Pool/BatchNorm lower to an empty schedule.
DotProductSchedule lower_layer(const LayerSpec& layer, std::size_t layer_index = 0);
std::vector<DotProductSchedule> lower_model(const ModelSpec& model);

Decomposition decompose(const DotProductOp& op, std::size_t chunk_size);

}  // namespace photosim::workload
