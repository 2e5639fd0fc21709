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

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "photosim/accelerator.hpp"
#include "photosim/error.hpp"
#include "photosim/rng.hpp"
#include "photosim/vdp_engine.hpp"
#include "reference_model.hpp"

namespace photosim::vdp {
namespace {

using workload::LayerSpec;
using workload::ModelSpec;
using workload::ModelWeights;

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

TEST(VDPUnitConfig, ForVector) {
    const auto u = VDPUnitConfig::for_vector(150);
    EXPECT_EQ(u.mrs_per_bank, 15u);
    EXPECT_EQ(u.arms, 10u);
    EXPECT_EQ(u.mr_count(), 300u);
    const auto small = VDPUnitConfig::for_vector(4);
    EXPECT_EQ(small.mrs_per_bank, 4u);
    EXPECT_EQ(small.arms, 1u);
    const auto odd = VDPUnitConfig::for_vector(20, 15);
    EXPECT_EQ(odd.arms, 2u);
}

TEST(VDPUnitConfig, RejectsSixteenRingBanks) {
    VDPUnitConfig u;
    u.mrs_per_bank = 16;
    try {
        u.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("15"), std::string::npos);
    }
    u.mrs_per_bank = 0;
    EXPECT_THROW(u.validate(), ValidationError);
}

TEST(Quantize, ZeroStaysZero) {
    for (int bits = 1; bits <= 16; ++bits) EXPECT_EQ(quantize(0.0, {bits, 1.0}), 0.0);
}

TEST(Quantize, OneBitConvention) {
    std::set<double> seen;
    for (int k = -100; k <= 100; ++k) seen.insert(quantize(0.013 * k, {1, 1.0}));
    EXPECT_EQ(seen, (std::set<double>{-1.0, 0.0, 1.0}));
}

TEST(Quantize, ErrorBoundOnDenseScan) {
    for (int bits : {2, 4, 8, 12, 16}) {
        const QuantizationSpec spec{bits, 1.0};
        const double bound = 1.0 / std::ldexp(1.0, bits);
        for (int k = -20000; k <= 20000; ++k) {
            const double x = k / 20000.0;
            EXPECT_LE(std::abs(quantize(x, spec) - x), bound + 1e-15) << "bits " << bits << " x " << x;
        }
    }
    EXPECT_LE(std::abs(quantize(0.5, {8, 1.0}) - 0.5), 1.0 / 256.0);
}

TEST(Quantize, IdempotentAndClamps) {
    Rng rng(4);
    for (int k = 0; k < 1000; ++k) {
        const QuantizationSpec spec{1 + static_cast<int>(rng.uniform() * 16), rng.uniform(0.1, 3.0)};
        const double x = rng.uniform(-5.0, 5.0);
        const double q = quantize(x, spec);
        EXPECT_EQ(quantize(q, spec), q);
        EXPECT_LE(std::abs(q), spec.range);
    }
    EXPECT_EQ(quantize(7.0, {8, 1.0}), 1.0);
    EXPECT_EQ(quantize(0.3, {8, 0.0}), 0.0);
    EXPECT_THROW(quantize(0.1, {0, 1.0}), ContractViolation);
    EXPECT_THROW(quantize(0.1, {17, 1.0}), ContractViolation);
    EXPECT_THROW(quantize(std::nan(""), {8, 1.0}), ContractViolation);
}

TEST(ExecuteOp, WorkedExample) {
    const std::vector<double> w = {0.5}, a = {0.8};
    EXPECT_EQ(execute_op(w, a, VDPUnitConfig::for_vector(1)), 0.4);
}

TEST(ExecuteOp, ZeroWeightsIgnoreNoise) {
    Rng rng(1);
    const std::vector<double> w(40, 0.0);
    const auto a = random_vector(rng, 40);
    ExecOptions opts;
    opts.max_noise = 0.3;
    opts.seed = 99;
    EXPECT_EQ(execute_op(w, a, VDPUnitConfig::for_vector(40), opts), 0.0);
}

TEST(ExecuteOp, MatchesPlainDotProduct) {
    Rng rng(2);
    const auto unit = VDPUnitConfig::for_vector(150);
    for (int trial = 0; trial < 100; ++trial) {
        const auto w = random_vector(rng, 150), a = random_vector(rng, 150);
        double oracle = 0.0;
        for (std::size_t i = 0; i < 150; ++i) oracle += w[i] * a[i];
        EXPECT_NEAR(execute_op(w, a, unit), oracle, 1e-12);
    }
}

TEST(ExecuteOp, ChunkSizeInvariantInExactMode) {
    Rng rng(3);
    const auto w = random_vector(rng, 60), a = random_vector(rng, 60);
    const double ref = execute_op(w, a, VDPUnitConfig::for_vector(60, 15));
    for (std::size_t mrs = 1; mrs <= 15; ++mrs) {
        EXPECT_NEAR(execute_op(w, a, VDPUnitConfig::for_vector(60, mrs)), ref, 1e-12);
    }
}

TEST(ExecuteOp, NoiseZeroIsBitwiseNoOpAndSeeded) {
    Rng rng(5);
    const auto w = random_vector(rng, 30), a = random_vector(rng, 30);
    const auto unit = VDPUnitConfig::for_vector(30);
    ExecOptions zero;
    zero.max_noise = 0.0;
    zero.seed = 17;
    EXPECT_EQ(execute_op(w, a, unit, zero), execute_op(w, a, unit));

    ExecOptions noisy;
    noisy.max_noise = 0.05;
    noisy.seed = 17;
    const double n1 = execute_op(w, a, unit, noisy);
    EXPECT_EQ(n1, execute_op(w, a, unit, noisy));
    noisy.seed = 18;
    EXPECT_NE(n1, execute_op(w, a, unit, noisy));

    double bound = 0.0;
    for (std::size_t i = 0; i < 30; ++i) bound += std::abs(w[i] * a[i]) * 0.05;
    EXPECT_LE(std::abs(n1 - execute_op(w, a, unit)), bound + 1e-12);
}

TEST(ExecuteOp, Errors) {
    const std::vector<double> w(16, 0.1), a(15, 0.1);
    EXPECT_THROW(execute_op(w, a, VDPUnitConfig::for_vector(16)), ContractViolation);
    EXPECT_THROW(execute_op(w, w, VDPUnitConfig::for_vector(15)), CapacityError);
}

TEST(ExecuteModel, IdentityPointwiseConv) {
    ModelSpec m;
    m.name = "identity";
    m.input = {3, 4, 4};
    m.layers = {LayerSpec::conv(1, 1, 3, 3, 1, 4, 4)};
    ModelWeights w;
    w.layers.push_back({{1, 0, 0, 0, 1, 0, 0, 0, 1}, {}});
    Rng rng(6);
    const auto input = random_vector(rng, 48);
    EXPECT_EQ(execute_model(m, w, input, AcceleratorConfig{}), input);
}

TEST(ExecuteModel, StoredMlpMatchesReference) {
    const auto m = workload::load_model(std::string(PHOTOSIM_SOURCE_DIR) + "/models/mlp_desk.json");
    const auto w = workload::load_weights(m);
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_vector(rng, m.input.size(), -2.0, 2.0);
        const auto got = execute_model(m, w, x, AcceleratorConfig{});
        const auto want = testing_ref::forward(m, w, x);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
    }
}

TEST(ExecuteModel, DeskCnnsMatchReferenceAcrossUnitSizes) {
    for (const char* name : {"cnn4_desk", "lenet_desk"}) {
        const auto m = workload::load_model(std::string(PHOTOSIM_SOURCE_DIR) + "/models/" + name + ".json");
        const auto w = workload::load_weights(m);
        Rng rng(8);
        const auto x = random_vector(rng, m.input.size(), 0.0, 1.0);
        const auto want = testing_ref::forward(m, w, x);
        for (std::size_t mrs : {1u, 7u, 15u}) {
            AcceleratorConfig cfg;
            cfg.N = 9;
            cfg.K = 40;
            cfg.mrs_per_bank = mrs;
            const auto got = execute_model(m, w, x, cfg);
            for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9) << name;
        }
    }
}

TEST(ExecuteModel, BatchNormAndPool) {
    ModelSpec m;
    m.name = "bn";
    m.input = {2, 4, 4};
    m.layers = {LayerSpec::batchnorm(2, 4, 4), LayerSpec::pool(2, 2, 2, 4, 4), LayerSpec::fc(8, 3, true)};
    ModelWeights w;
    Rng rng(9);
    w.layers.push_back({{2.0, -0.5}, {0.1, 0.3}});
    w.layers.push_back({});
    w.layers.push_back({random_vector(rng, 24), random_vector(rng, 3)});
    const auto x = random_vector(rng, 32);
    const auto got = execute_model(m, w, x, AcceleratorConfig{});
    const auto want = testing_ref::forward(m, w, x);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(ExecuteModel, QuantizedNoisyRunsAreDeterministic) {
    const auto m = workload::load_model(std::string(PHOTOSIM_SOURCE_DIR) + "/models/cnn4_desk.json");
    const auto w = workload::load_weights(m);
    Rng rng(10);
    const auto x = random_vector(rng, m.input.size(), 0.0, 1.0);
    InferenceOptions opts;
    opts.bits = 4;
    opts.max_noise = 0.02;
    opts.seed = 123;
    EXPECT_EQ(execute_model(m, w, x, AcceleratorConfig{}, opts), execute_model(m, w, x, AcceleratorConfig{}, opts));
    InferenceOptions quiet = opts;
    quiet.max_noise = 0.0;
    InferenceOptions off = opts;
    off.max_noise.reset();
    EXPECT_EQ(execute_model(m, w, x, AcceleratorConfig{}, quiet), execute_model(m, w, x, AcceleratorConfig{}, off));
}

TEST(ExecuteModel, ShapeErrors) {
    const auto m = workload::load_model(std::string(PHOTOSIM_SOURCE_DIR) + "/models/mlp_desk.json");
    const auto w = workload::load_weights(m);
    const std::vector<double> wrong(m.input.size() + 1, 0.0);
    EXPECT_THROW(execute_model(m, w, wrong, AcceleratorConfig{}), LoweringError);
    ModelWeights missing;
    const std::vector<double> x(m.input.size(), 0.0);
    EXPECT_THROW(execute_model(m, missing, x, AcceleratorConfig{}), LoweringError);
}

}  // namespace
}  // namespace photosim::vdp
