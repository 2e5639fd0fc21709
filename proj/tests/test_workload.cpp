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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "photosim/error.hpp"
#include "photosim/rng.hpp"
#include "photosim/workload.hpp"

namespace photosim::workload {
namespace {

namespace fs = std::filesystem;

// Counts multiplies by walking the convolution loop nest.
std::size_t brute_force_conv_macs(const LayerSpec& l) {
    std::size_t macs = 0;
    for (std::size_t oc = 0; oc < l.out_channels; ++oc)
        for (std::size_t y = 0; y + l.kernel_h <= l.input_h; y += l.stride)
            for (std::size_t x = 0; x + l.kernel_w <= l.input_w; x += l.stride)
                for (std::size_t ic = 0; ic < l.in_channels; ++ic)
                    for (std::size_t ky = 0; ky < l.kernel_h; ++ky)
                        for (std::size_t kx = 0; kx < l.kernel_w; ++kx) ++macs;
    return macs;
}

TEST(ConvToSchedule, TwoByTwoWorkedExample) {
    const auto s = conv_to_schedule(LayerSpec::conv(2, 2, 1, 1, 1, 2, 2));
    ASSERT_EQ(s.op_count(), 1u);
    EXPECT_EQ(s.ops[0].length, 4u);
    EXPECT_EQ(s.ops[0].role, LayerKind::Conv);
}

TEST(ConvToSchedule, PointwiseKernel) {
    const auto s = conv_to_schedule(LayerSpec::conv(1, 1, 1, 1, 1, 7, 5));
    EXPECT_EQ(s.op_count(), 35u);
    for (const auto& op : s.ops) EXPECT_EQ(op.length, 1u);
}

TEST(ConvToSchedule, ClosedFormCount) {
    const auto layer = LayerSpec::conv(3, 3, 8, 16, 1, 10, 10);
    const auto s = conv_to_schedule(layer, 4);
    EXPECT_EQ(s.op_count(), 1024u);
    EXPECT_EQ(s.ops.front().length, 72u);
    EXPECT_EQ(s.ops.front().layer_index, 4u);
    EXPECT_EQ(s.total_macs(), 73728u);
    EXPECT_EQ(brute_force_conv_macs(layer), 73728u);
    EXPECT_EQ(layer.mac_count(), 73728u);
}

TEST(ConvToSchedule, RandomLayersMatchLoopCounter) {
    Rng rng(8);
    for (int k = 0; k < 200; ++k) {
        const std::size_t kh = 1 + static_cast<std::size_t>(rng.uniform() * 4);
        const std::size_t kw = 1 + static_cast<std::size_t>(rng.uniform() * 4);
        const std::size_t stride = 1 + static_cast<std::size_t>(rng.uniform() * 3);
        const std::size_t oh = 1 + static_cast<std::size_t>(rng.uniform() * 6);
        const std::size_t ow = 1 + static_cast<std::size_t>(rng.uniform() * 6);
        const auto layer = LayerSpec::conv(kh, kw, 1 + static_cast<std::size_t>(rng.uniform() * 5),
                                           1 + static_cast<std::size_t>(rng.uniform() * 5), stride,
                                           (oh - 1) * stride + kh, (ow - 1) * stride + kw);
        EXPECT_EQ(conv_to_schedule(layer).total_macs(), brute_force_conv_macs(layer));
        EXPECT_EQ(conv_to_schedule(layer), conv_to_schedule(layer));
    }
}

TEST(ConvToSchedule, KindMismatch) {
    EXPECT_THROW(conv_to_schedule(LayerSpec::fc(4, 4)), KindMismatchError);
    EXPECT_THROW(fc_to_schedule(LayerSpec::conv(2, 2, 1, 1, 1, 2, 2)), KindMismatchError);
}

TEST(FcToSchedule, Examples) {
    const auto a = fc_to_schedule(LayerSpec::fc(100, 100));
    EXPECT_EQ(a.op_count(), 100u);
    EXPECT_EQ(a.ops.front().length, 100u);
    const auto b = fc_to_schedule(LayerSpec::fc(1, 1));
    EXPECT_EQ(b.op_count(), 1u);
    EXPECT_EQ(b.ops.front().length, 1u);
    const auto c = fc_to_schedule(LayerSpec::fc(784, 10));
    EXPECT_EQ(c.op_count(), 10u);
    EXPECT_EQ(c.ops.front().length, 784u);
    EXPECT_EQ(c.total_macs(), 7840u);
}

TEST(Decompose, Examples) {
    const auto a = decompose({4, 0, LayerKind::Conv}, 2);
    EXPECT_EQ(a.chunk_count, 2u);
    EXPECT_EQ(a.accumulation_stages, 1u);
    const auto b = decompose({9, 0, LayerKind::FC}, 9);
    EXPECT_EQ(b.chunk_count, 1u);
    EXPECT_EQ(b.accumulation_stages, 0u);
    const auto c = decompose({150, 0, LayerKind::FC}, 15);
    EXPECT_EQ(c.chunk_count, 10u);
    EXPECT_EQ(c.tail_length, 0u);
    EXPECT_EQ(c.accumulation_stages, 1u);
    EXPECT_EQ(decompose({17, 0, LayerKind::FC}, 5).tail_length, 2u);
    EXPECT_THROW(decompose({4, 0, LayerKind::FC}, 0), ContractViolation);
}

TEST(Decompose, ConservesElements) {
    for (std::size_t len = 1; len <= 60; ++len) {
        for (std::size_t chunk = 1; chunk <= 20; ++chunk) {
            const auto d = decompose({len, 0, LayerKind::FC}, chunk);
            EXPECT_GE(d.chunk_count * chunk, len);
            EXPECT_LT((d.chunk_count - 1) * chunk, len);
        }
    }
}

TEST(LayerSpec, ValidationRejectsBadShapes) {
    EXPECT_THROW(LayerSpec::conv(3, 3, 1, 1, 1, 2, 2).validate(), Error);
    EXPECT_THROW(LayerSpec::conv(2, 2, 1, 1, 2, 5, 5).validate(), Error);
    EXPECT_THROW(LayerSpec::fc(0, 3).validate(), Error);
    EXPECT_NO_THROW(LayerSpec::pool(2, 2, 3, 4, 4).validate());
    EXPECT_EQ(LayerSpec::pool(2, 2, 3, 4, 4).mac_count(), 0u);
}

TEST(ModelSpec, ChainingErrorNamesLayer) {
    ModelSpec m;
    m.name = "broken";
    m.input = {1, 4, 4};
    m.layers = {LayerSpec::conv(3, 3, 1, 2, 1, 4, 4), LayerSpec::fc(10, 3)};
    try {
        m.validate();
        FAIL() << "expected a lowering error";
    } catch (const LoweringError& e) {
        EXPECT_NE(std::string(e.what()).find("layer 1"), std::string::npos) << e.what();
    }
}

TEST(ModelJson, LoadsDeskModels) {
    const fs::path dir = fs::path(PHOTOSIM_SOURCE_DIR) / "models";
    const auto lenet = load_model(dir / "lenet_desk.json");
    EXPECT_EQ(lenet.layers.size(), 6u);
    EXPECT_EQ(lenet.output_shape().size(), 10u);
    const auto weights = load_weights(lenet);
    EXPECT_EQ(weights.layers.size(), 6u);
    EXPECT_EQ(weights.layers[0].weights.size(), 150u);
    const auto cnn = load_model(dir / "cnn4_desk.json");
    std::size_t conv = 0, fc = 0;
    for (const auto& l : cnn.layers) {
        conv += l.kind == LayerKind::Conv;
        fc += l.kind == LayerKind::FC;
    }
    EXPECT_EQ(conv, 2u);
    EXPECT_EQ(fc, 2u);
}

TEST(ModelJson, RoundTrip) {
    const auto m = load_model(fs::path(PHOTOSIM_SOURCE_DIR) / "models" / "cnn4_desk.json");
    const auto again = model_from_json(model_to_json(m));
    EXPECT_EQ(again.input, m.input);
    ASSERT_EQ(again.layers.size(), m.layers.size());
    EXPECT_EQ(lower_model(again), lower_model(m));
}

TEST(ModelJson, RejectsUnknownKeysAndBadShapes) {
    auto doc = nlohmann::json::parse(R"({"name":"x","input_shape":[4],"layers":[{"type":"fc","out_features":2}]})");
    EXPECT_NO_THROW(model_from_json(doc));
    auto extra = doc;
    extra["colour"] = "red";
    EXPECT_THROW(model_from_json(extra), LoweringError);
    auto layer_extra = doc;
    layer_extra["layers"][0]["padding"] = 1;
    EXPECT_THROW(model_from_json(layer_extra), LoweringError);
    auto bad_type = doc;
    bad_type["layers"][0]["type"] = "lstm";
    EXPECT_THROW(model_from_json(bad_type), LoweringError);
    auto bad_shape = doc;
    bad_shape["input_shape"] = nlohmann::json::array({1, 2});
    EXPECT_THROW(model_from_json(bad_shape), LoweringError);
    auto mismatch = doc;
    mismatch["layers"][0]["in_features"] = 5;
    EXPECT_THROW(model_from_json(mismatch), LoweringError);
}

TEST(Weights, SaveLoadRoundTripAndSizeCheck) {
    ModelSpec m;
    m.name = "tiny";
    m.input = {3, 1, 1};
    m.layers = {LayerSpec::fc(3, 2, true)};
    ModelWeights w;
    w.layers.push_back({{0.5, -0.25, 1.0, 2.0, -3.0, 0.125}, {0.75, -1.5}});
    const fs::path path = fs::path(testing::TempDir()) / "tiny_weights.bin";
    save_weights(m, w, path);
    const auto back = load_weights(m, path);
    EXPECT_EQ(back.layers[0].weights, w.layers[0].weights);
    EXPECT_EQ(back.layers[0].bias, w.layers[0].bias);

    std::ofstream(path, std::ios::binary | std::ios::trunc) << "abc";
    EXPECT_THROW(load_weights(m, path), LoweringError);
    EXPECT_THROW(load_weights(m), Error);
}

}  // namespace
}  // namespace photosim::workload
