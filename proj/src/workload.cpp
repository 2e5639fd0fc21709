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

#include "photosim/workload.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include "photosim/error.hpp"

namespace photosim::workload {

using nlohmann::json;

std::string_view to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv: return "conv";
        case LayerKind::FC: return "fc";
        case LayerKind::Pool: return "pool";
        case LayerKind::BatchNorm: return "batchnorm";
    }
    return "unknown";
}

LayerSpec LayerSpec::conv(std::size_t kernel_h, std::size_t kernel_w, std::size_t in_channels,
                          std::size_t out_channels, std::size_t stride, std::size_t input_h, std::size_t input_w,
                          bool bias) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.kernel_h = kernel_h;
    l.kernel_w = kernel_w;
    l.in_channels = in_channels;
    l.out_channels = out_channels;
    l.stride = stride;
    l.input_h = input_h;
    l.input_w = input_w;
    l.bias = bias;
    return l;
}

LayerSpec LayerSpec::fc(std::size_t in_features, std::size_t out_features, bool bias) {
    LayerSpec l;
    l.kind = LayerKind::FC;
    l.in_features = in_features;
    l.out_features = out_features;
    l.bias = bias;
    return l;
}

LayerSpec LayerSpec::pool(std::size_t kernel, std::size_t stride, std::size_t channels, std::size_t input_h,
                          std::size_t input_w) {
    LayerSpec l;
    l.kind = LayerKind::Pool;
    l.kernel_h = kernel;
    l.kernel_w = kernel;
    l.stride = stride;
    l.in_channels = channels;
    l.out_channels = channels;
    l.input_h = input_h;
    l.input_w = input_w;
    return l;
}

LayerSpec LayerSpec::batchnorm(std::size_t channels, std::size_t input_h, std::size_t input_w) {
    LayerSpec l;
    l.kind = LayerKind::BatchNorm;
    l.in_channels = channels;
    l.out_channels = channels;
    l.input_h = input_h;
    l.input_w = input_w;
    return l;
}

std::size_t LayerSpec::out_h() const {
    switch (kind) {
        case LayerKind::Conv:
        case LayerKind::Pool: return input_h >= kernel_h ? (input_h - kernel_h) / stride + 1 : 0;
        case LayerKind::BatchNorm: return input_h;
        case LayerKind::FC: return 1;
    }
    return 0;
}

std::size_t LayerSpec::out_w() const {
    switch (kind) {
        case LayerKind::Conv:
        case LayerKind::Pool: return input_w >= kernel_w ? (input_w - kernel_w) / stride + 1 : 0;
        case LayerKind::BatchNorm: return input_w;
        case LayerKind::FC: return 1;
    }
    return 0;
}

TensorShape LayerSpec::input_shape() const {
    if (kind == LayerKind::FC) {
        return {in_features, 1, 1};
    }
    return {in_channels, input_h, input_w};
}

TensorShape LayerSpec::output_shape() const {
    if (kind == LayerKind::FC) {
        return {out_features, 1, 1};
    }
    return {out_channels, out_h(), out_w()};
}

std::size_t LayerSpec::mac_count() const {
    switch (kind) {
        case LayerKind::Conv: return out_h() * out_w() * out_channels * kernel_h * kernel_w * in_channels;
        case LayerKind::FC: return in_features * out_features;
        default: return 0;
    }
}

std::size_t LayerSpec::parameter_count() const {
    switch (kind) {
        case LayerKind::Conv:
            return out_channels * in_channels * kernel_h * kernel_w + (bias ? out_channels : 0);
        case LayerKind::FC: return in_features * out_features + (bias ? out_features : 0);
        case LayerKind::BatchNorm: return 2 * in_channels;
        case LayerKind::Pool: return 0;
    }
    return 0;
}

void LayerSpec::validate() const {
    const std::string name(to_string(kind));
    auto positive = [&](std::size_t v, const char* field) {
        if (v < 1) {
            throw LoweringError(name + " layer: " + field + " must be >= 1");
        }
    };
    switch (kind) {
        case LayerKind::FC:
            positive(in_features, "in_features");
            positive(out_features, "out_features");
            return;
        case LayerKind::BatchNorm:
            positive(in_channels, "channels");
            positive(input_h, "input_h");
            positive(input_w, "input_w");
            return;
        case LayerKind::Conv:
        case LayerKind::Pool:
            positive(kernel_h, "kernel_h");
            positive(kernel_w, "kernel_w");
            positive(in_channels, "in_channels");
            positive(out_channels, "out_channels");
            positive(stride, "stride");
            positive(input_h, "input_h");
            positive(input_w, "input_w");
            if (kind == LayerKind::Pool && out_channels != in_channels) {
                throw LoweringError("pool layer must preserve channel count");
            }
            if (kernel_h > input_h || kernel_w > input_w) {
                throw LoweringError(name + " layer: kernel larger than input");
            }
            if ((input_h - kernel_h) % stride != 0 || (input_w - kernel_w) % stride != 0) {
                throw LoweringError(name + " layer: stride does not tile the input exactly (pre-pad the model)");
            }
            return;
    }
}

TensorShape ModelSpec::output_shape() const { return layers.empty() ? input : layers.back().output_shape(); }

std::size_t ModelSpec::parameter_count() const {
    std::size_t total = 0;
    for (const auto& l : layers) {
        total += l.parameter_count();
    }
    return total;
}

void ModelSpec::validate() const {
    if (layers.empty()) {
        throw LoweringError("model '" + name + "' has no layers");
    }
    TensorShape current = input;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& layer = layers[k];
        const std::string where = "model '" + name + "' layer " + std::to_string(k) + " (" +
                                  std::string(to_string(layer.kind)) + ")";
        try {
            layer.validate();
        } catch (const LoweringError& e) {
            throw LoweringError(where + ": " + e.what());
        }
        const bool ok = layer.kind == LayerKind::FC ? layer.in_features == current.size()
                                                    : layer.input_shape() == current;
        if (!ok) {
            const auto in = layer.input_shape();
            throw LoweringError(where + ": expects input " + std::to_string(in.channels) + "x" +
                                std::to_string(in.height) + "x" + std::to_string(in.width) + " but receives " +
                                std::to_string(current.channels) + "x" + std::to_string(current.height) + "x" +
                                std::to_string(current.width));
        }
        current = layer.output_shape();
    }
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            throw LoweringError(where + ": unknown key '" + key + "'");
        }
    }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw LoweringError(where + ": '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::pair<std::size_t, std::size_t> get_kernel(const json& obj, const std::string& where) {
    if (!obj.contains("kernel")) {
        throw LoweringError(where + ": missing 'kernel'");
    }
    const auto& k = obj.at("kernel");
    if (k.is_number_integer()) {
        const auto v = k.get<std::size_t>();
        return {v, v};
    }
    if (k.is_array() && k.size() == 2 && k[0].is_number_integer() && k[1].is_number_integer()) {
        return {k[0].get<std::size_t>(), k[1].get<std::size_t>()};
    }
    throw LoweringError(where + ": 'kernel' must be an integer or [h, w]");
}

}  // namespace

ModelSpec model_from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw LoweringError("model description must be a JSON object");
    }
    reject_unknown(doc, {"name", "input_shape", "weights", "layers"}, "model");
    ModelSpec model;
    model.name = doc.value("name", std::string("unnamed"));

    if (!doc.contains("input_shape") || !doc.at("input_shape").is_array()) {
        throw LoweringError("model '" + model.name + "': 'input_shape' must be [C, H, W] or [features]");
    }
    const auto& shape = doc.at("input_shape");
    std::vector<std::size_t> dims;
    for (const auto& d : shape) {
        if (!d.is_number_integer() || d.get<long long>() < 1) {
            throw LoweringError("model '" + model.name + "': input_shape entries must be positive integers");
        }
        dims.push_back(d.get<std::size_t>());
    }
    if (dims.size() == 1) {
        model.input = {dims[0], 1, 1};
    } else if (dims.size() == 3) {
        model.input = {dims[0], dims[1], dims[2]};
    } else {
        throw LoweringError("model '" + model.name + "': input_shape must have 1 or 3 entries");
    }

    if (doc.contains("weights")) {
        std::filesystem::path w = doc.at("weights").get<std::string>();
        model.weights_path = w.is_relative() && !base_dir.empty() ? base_dir / w : w;
    }

    if (!doc.contains("layers") || !doc.at("layers").is_array()) {
        throw LoweringError("model '" + model.name + "': 'layers' must be an array");
    }
    TensorShape current = model.input;
    std::size_t index = 0;
    for (const auto& item : doc.at("layers")) {
        const std::string where = "model '" + model.name + "' layer " + std::to_string(index);
        if (!item.is_object() || !item.contains("type")) {
            throw LoweringError(where + ": each layer needs a 'type'");
        }
        const auto type = item.at("type").get<std::string>();
        LayerSpec layer;
        if (type == "conv") {
            reject_unknown(item,
                           {"type", "kernel", "out_channels", "stride", "bias", "in_channels", "input_h", "input_w"},
                           where);
            const auto [kh, kw] = get_kernel(item, where);
            layer = LayerSpec::conv(kh, kw, get_count(item, "in_channels", current.channels, where),
                                    get_count(item, "out_channels", 0, where), get_count(item, "stride", 1, where),
                                    get_count(item, "input_h", current.height, where),
                                    get_count(item, "input_w", current.width, where), item.value("bias", false));
        } else if (type == "fc") {
            reject_unknown(item, {"type", "out_features", "in_features", "bias"}, where);
            layer = LayerSpec::fc(get_count(item, "in_features", current.size(), where),
                                  get_count(item, "out_features", 0, where), item.value("bias", false));
        } else if (type == "pool") {
            reject_unknown(item, {"type", "kernel", "stride"}, where);
            const auto [kh, kw] = get_kernel(item, where);
            layer = LayerSpec::pool(kh, get_count(item, "stride", kh, where), current.channels, current.height,
                                    current.width);
            layer.kernel_w = kw;
        } else if (type == "batchnorm") {
            reject_unknown(item, {"type"}, where);
            layer = LayerSpec::batchnorm(current.channels, current.height, current.width);
        } else {
            throw LoweringError(where + ": unknown layer type '" + type + "'");
        }
        model.layers.push_back(layer);
        current = layer.output_shape();
        ++index;
    }
    model.validate();
    return model;
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigMissingError("model file '" + path.string() + "' cannot be opened");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigSyntaxError("model file '" + path.string() + "': " + e.what());
    }
    try {
        return model_from_json(doc, path.parent_path());
    } catch (const json::exception& e) {
        throw LoweringError("model file '" + path.string() + "': " + e.what());
    }
}

json model_to_json(const ModelSpec& model) {
    json doc;
    doc["name"] = model.name;
    doc["input_shape"] = json::array({model.input.channels, model.input.height, model.input.width});
    if (model.weights_path) {
        doc["weights"] = model.weights_path->string();
    }
    json layers = json::array();
    for (const auto& l : model.layers) {
        json item;
        item["type"] = std::string(to_string(l.kind));
        switch (l.kind) {
            case LayerKind::Conv:
                item["kernel"] = json::array({l.kernel_h, l.kernel_w});
                item["in_channels"] = l.in_channels;
                item["out_channels"] = l.out_channels;
                item["stride"] = l.stride;
                item["input_h"] = l.input_h;
                item["input_w"] = l.input_w;
                item["bias"] = l.bias;
                break;
            case LayerKind::FC:
                item["in_features"] = l.in_features;
                item["out_features"] = l.out_features;
                item["bias"] = l.bias;
                break;
            case LayerKind::Pool:
                item["kernel"] = json::array({l.kernel_h, l.kernel_w});
                item["stride"] = l.stride;
                break;
            case LayerKind::BatchNorm: break;
        }
        layers.push_back(std::move(item));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

namespace {

float read_le_float(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

void write_le_float(std::ostream& out, float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    const unsigned char bytes[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                    static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

ModelWeights load_weights(const ModelSpec& model, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("weights file '" + path.string() + "' cannot be opened");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t expected = model.parameter_count() * 4;
    if (bytes.size() != expected) {
        throw LoweringError("weights file '" + path.string() + "' has " + std::to_string(bytes.size()) +
                            " bytes; model '" + model.name + "' needs " + std::to_string(expected));
    }
    ModelWeights out;
    const unsigned char* p = bytes.data();
    auto take = [&p](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = read_le_float(p);
            p += 4;
        }
        return v;
    };
    for (const auto& l : model.layers) {
        LayerWeights lw;
        switch (l.kind) {
            case LayerKind::Conv:
                lw.weights = take(l.out_channels * l.in_channels * l.kernel_h * l.kernel_w);
                if (l.bias) lw.bias = take(l.out_channels);
                break;
            case LayerKind::FC:
                lw.weights = take(l.in_features * l.out_features);
                if (l.bias) lw.bias = take(l.out_features);
                break;
            case LayerKind::BatchNorm:
                lw.weights = take(l.in_channels);
                lw.bias = take(l.in_channels);
                break;
            case LayerKind::Pool: break;
        }
        out.layers.push_back(std::move(lw));
    }
    return out;
}

ModelWeights load_weights(const ModelSpec& model) {
    if (!model.weights_path) {
        throw LoweringError("model '" + model.name + "' does not reference a weights file");
    }
    return load_weights(model, *model.weights_path);
}

void save_weights(const ModelSpec& model, const ModelWeights& weights, const std::filesystem::path& path) {
    if (weights.layers.size() != model.layers.size()) {
        throw LoweringError("weights do not match model '" + model.name + "' layer count");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write weights file '" + path.string() + "'");
    }
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const auto& lw = weights.layers[k];
        for (double v : lw.weights) write_le_float(out, static_cast<float>(v));
        for (double v : lw.bias) write_le_float(out, static_cast<float>(v));
    }
}

std::size_t DotProductSchedule::total_macs() const {
    std::size_t total = 0;
    for (const auto& op : ops) {
        total += op.length;
    }
    return total;
}

std::size_t DotProductSchedule::total_chunks(std::size_t chunk_size) const {
    std::size_t total = 0;
    for (const auto& op : ops) {
        total += decompose(op, chunk_size).chunk_count;
    }
    return total;
}

std::size_t DotProductSchedule::total_accumulations(std::size_t chunk_size) const {
    std::size_t total = 0;
    for (const auto& op : ops) {
        total += decompose(op, chunk_size).accumulation_stages;
    }
    return total;
}

DotProductSchedule conv_to_schedule(const LayerSpec& layer, std::size_t layer_index) {
    if (layer.kind != LayerKind::Conv) {
        throw KindMismatchError("conv_to_schedule given a " + std::string(to_string(layer.kind)) + " layer");
    }
    layer.validate();
    const std::size_t length = layer.kernel_h * layer.kernel_w * layer.in_channels;
    DotProductSchedule s;
    s.ops.assign(layer.out_h() * layer.out_w() * layer.out_channels, {length, layer_index, LayerKind::Conv});
    return s;
}

DotProductSchedule fc_to_schedule(const LayerSpec& layer, std::size_t layer_index) {
    if (layer.kind != LayerKind::FC) {
        throw KindMismatchError("fc_to_schedule given a " + std::string(to_string(layer.kind)) + " layer");
    }
    layer.validate();
    DotProductSchedule s;
    s.ops.assign(layer.out_features, {layer.in_features, layer_index, LayerKind::FC});
    return s;
}

DotProductSchedule lower_layer(const LayerSpec& layer, std::size_t layer_index) {
    switch (layer.kind) {
        case LayerKind::Conv: return conv_to_schedule(layer, layer_index);
        case LayerKind::FC: return fc_to_schedule(layer, layer_index);
        default: layer.validate(); return {};
    }
}

std::vector<DotProductSchedule> lower_model(const ModelSpec& model) {
    model.validate();
    std::vector<DotProductSchedule> out;
    out.reserve(model.layers.size());
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        out.push_back(lower_layer(model.layers[k], k));
    }
    return out;
}

Decomposition decompose(const DotProductOp& op, std::size_t chunk_size) {
    if (chunk_size == 0) {
        throw ContractViolation("chunk size must be >= 1");
    }
    if (op.length == 0) {
        throw ContractViolation("dot product length must be >= 1");
    }
    Decomposition d;
    d.chunk_count = (op.length + chunk_size - 1) / chunk_size;
    d.tail_length = op.length % chunk_size;
    d.accumulation_stages = d.chunk_count > 1 ? 1 : 0;
    return d;
}

}  // namespace photosim::workload
