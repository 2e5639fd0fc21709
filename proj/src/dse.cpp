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

#include "photosim/dse.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "photosim/error.hpp"

namespace photosim::dse {

std::string variant_name(const VariantFlags& flags) {
    std::string name = flags.optimized_mr ? "opt" : "base";
    if (flags.ted_enabled) {
        name += "_ted";
    }
    return name;
}

VariantFlags parse_variant(const std::string& name) {
    if (name == "base") return {false, false};
    if (name == "base_ted") return {false, true};
    if (name == "opt") return {true, false};
    if (name == "opt_ted") return {true, true};
    throw ValidationError("variant '" + name + "' is not one of base, base_ted, opt, opt_ted");
}

ConfigKey key_of(const AcceleratorConfig& cfg) {
    return {cfg.N, cfg.K, cfg.n, cfg.m, {cfg.optimized_mr, cfg.ted_enabled}};
}

AcceleratorConfig apply(const AcceleratorConfig& base, const ConfigKey& key) {
    AcceleratorConfig cfg = base;
    cfg.N = key.N;
    cfg.K = key.K;
    cfg.n = key.n;
    cfg.m = key.m;
    cfg.optimized_mr = key.flags.optimized_mr;
    cfg.ted_enabled = key.flags.ted_enabled;
    return cfg;
}

NamedModel::NamedModel(workload::ModelSpec model)
    : spec(std::move(model)), schedules(workload::lower_model(spec)) {}

SweepPoint evaluate_point(const AcceleratorConfig& cfg, const std::vector<NamedModel>& models, std::uint64_t seed) {
    if (models.empty()) {
        throw ContractViolation("sweep needs at least one model");
    }
    cfg.validate();
    const auto power = perf::power_breakdown(cfg, seed);
    SweepPoint p;
    p.key = key_of(cfg);
    for (const auto& model : models) {
        p.per_model.push_back(perf::evaluate(model.spec, model.schedules, cfg, power));
    }
    const double count = static_cast<double>(models.size());
    for (const auto& r : p.per_model) {
        p.avg_fps += r.fps / count;
        p.avg_epb_pj += r.energy_per_bit_pj / count;
        p.avg_latency_s += r.latency_s / count;
        p.avg_power_mw += r.total_power_mw / count;
    }
    p.area_mm2 = p.per_model.front().area_mm2;
    p.resolution_bits = p.per_model.front().resolution_bits;
    return p;
}

namespace {

bool dominates(const SweepPoint& a, const SweepPoint& b) {
    const bool no_worse = a.avg_fps >= b.avg_fps && a.avg_epb_pj <= b.avg_epb_pj && a.area_mm2 <= b.area_mm2;
    const bool better = a.avg_fps > b.avg_fps || a.avg_epb_pj < b.avg_epb_pj || a.area_mm2 < b.area_mm2;
    return no_worse && better;
}

}  // namespace

SweepResult sweep(const SweepGrid& grid, const std::vector<workload::ModelSpec>& models,
                  const AcceleratorConfig& base, std::uint64_t seed, std::size_t jobs) {
    if (grid.N.empty() || grid.K.empty() || grid.n.empty() || grid.m.empty()) {
        throw ContractViolation("sweep grid has an empty axis");
    }
    if (models.empty()) {
        throw ContractViolation("sweep needs at least one model");
    }
    std::vector<VariantFlags> variants = grid.variants;
    if (variants.empty()) {
        variants.push_back({base.optimized_mr, base.ted_enabled});
    }

    // Deduplicated, ordered candidate set.
    std::vector<ConfigKey> keys;
    for (auto N : grid.N)
        for (auto K : grid.K)
            for (auto n : grid.n)
                for (auto m : grid.m)
                    for (const auto& v : variants) keys.push_back({N, K, n, m, v});
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    SweepResult result;
    result.area_cap_mm2 = grid.area_cap_mm2;
    std::vector<ConfigKey> admissible;
    for (const auto& key : keys) {
        if (!(key.n > key.m)) {
            result.skipped.push_back({key, "requires n > m"});
        } else if (!(key.K > key.N)) {
            result.skipped.push_back({key, "requires K > N"});
        } else {
            admissible.push_back(key);
        }
    }

    std::vector<NamedModel> named;
    named.reserve(models.size());
    for (const auto& m : models) {
        named.emplace_back(m);
    }

    std::vector<SweepPoint> points(admissible.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < admissible.size(); i = next++) {
            try {
                points[i] = evaluate_point(apply(base, admissible[i]), named, seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, admissible.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (auto& p : points) {
        p.over_area_cap = grid.area_cap_mm2 && p.area_mm2 > *grid.area_cap_mm2;
    }
    for (auto& p : points) {
        p.pareto = std::none_of(points.begin(), points.end(), [&](const SweepPoint& q) { return dominates(q, p); });
    }
    result.points = std::move(points);
    return result;
}

const SweepPoint& select_best(const SweepResult& result) {
    if (result.points.empty()) {
        throw ContractViolation("no sweep results to select from");
    }
    const SweepPoint* best = nullptr;
    for (const auto& p : result.points) {
        if (p.over_area_cap) {
            continue;
        }
        if (best == nullptr) {
            best = &p;
            continue;
        }
        const double a = p.objective(), b = best->objective();
        if (a > b || (a == b && (p.avg_fps > best->avg_fps || (p.avg_fps == best->avg_fps && p.key < best->key)))) {
            best = &p;
        }
    }
    if (best == nullptr) {
        throw InfeasibleError("every configuration exceeds the area cap");
    }
    return *best;
}

const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows = {
        {"P100", 971.31, 24.9},        {"IXP 9282", 5099.68, 2.39},   {"AMD-TR", 5831.18, 2.09},
        {"DaDianNao", 58.33, 0.65},    {"Edge TPU", 697.37, 17.53},   {"Null Hop", 2727.43, 4.48},
        {"DEAP CNN", 44453.88, 0.07},  {"Holylight", 274.13, 3.3},    {"base", 142.35, 10.78},
        {"base_ted", 92.64, 16.54}, {"opt", 75.58, 20.25}, {"opt_ted", 28.78, 52.59},
    };
    return rows;
}

VariantTable compare_variants(const std::vector<workload::ModelSpec>& models, const AcceleratorConfig& base,
                              std::size_t seeds, std::uint64_t seed) {
    if (models.empty()) {
        throw ContractViolation("variant comparison needs at least one model");
    }
    if (seeds == 0) {
        throw ContractViolation("variant comparison needs at least one seed");
    }
    std::vector<NamedModel> named;
    for (const auto& m : models) {
        named.emplace_back(m);
    }
    VariantTable table;
    table.seeds = seeds;
    const VariantFlags order[] = {{false, false}, {false, true}, {true, false}, {true, true}};
    for (const auto& flags : order) {
        AcceleratorConfig cfg = base;
        cfg.optimized_mr = flags.optimized_mr;
        cfg.ted_enabled = flags.ted_enabled;
        cfg.validate();
        VariantRow row;
        row.name = variant_name(flags);
        row.flags = flags;
        const double samples = static_cast<double>(seeds * named.size());
        for (std::size_t s = 0; s < seeds; ++s) {
            const auto power = perf::power_breakdown(cfg, seed + s);
            for (const auto& model : named) {
                const auto r = perf::evaluate(model.spec, model.schedules, cfg, power);
                row.power_mw += r.total_power_mw / samples;
                row.to_tuning_mw += r.power.to_tuning_mw / samples;
                row.epb_pj += r.energy_per_bit_pj / samples;
                row.kfps_per_watt += r.kfps_per_watt / samples;
                row.fps += r.fps / samples;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace photosim::dse
