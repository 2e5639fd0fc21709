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

#include "photosim/reports.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "photosim/error.hpp"

namespace photosim::reports {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_header(const Provenance& prov) {
    return "# photosim " + prov.version + "\n# config_hash " + prov.config_hash + "\n# seed " +
           std::to_string(prov.seed) + "\n";
}

ordered_json provenance_json(const Provenance& prov) {
    ordered_json j;
    j["version"] = prov.version;
    j["config_hash"] = prov.config_hash;
    j["seed"] = prov.seed;
    return j;
}

ordered_json key_json(const dse::ConfigKey& key) {
    ordered_json j;
    j["N"] = key.N;
    j["K"] = key.K;
    j["n"] = key.n;
    j["m"] = key.m;
    j["variant"] = dse::variant_name(key.flags);
    j["optimized_mr"] = key.flags.optimized_mr;
    j["ted_enabled"] = key.flags.ted_enabled;
    return j;
}

std::string key_cells(const dse::ConfigKey& key) {
    return fmt::format("{},{},{},{},{}", key.N, key.K, key.n, key.m, dse::variant_name(key.flags));
}

ordered_json power_json(const perf::PowerBreakdown& p) {
    ordered_json j;
    j["laser_mw"] = p.laser_mw;
    j["to_tuning_mw"] = p.to_tuning_mw;
    j["eo_tuning_mw"] = p.eo_tuning_mw;
    j["pd_mw"] = p.pd_mw;
    j["tia_mw"] = p.tia_mw;
    j["vcsel_mw"] = p.vcsel_mw;
    j["converters_mw"] = p.converters_mw;
    return j;
}

ordered_json point_json(const dse::SweepPoint& p) {
    ordered_json j = key_json(p.key);
    j["avg_fps"] = p.avg_fps;
    j["avg_epb_pj"] = p.avg_epb_pj;
    j["avg_latency_s"] = p.avg_latency_s;
    j["avg_power_mw"] = p.avg_power_mw;
    j["area_mm2"] = p.area_mm2;
    j["resolution_bits"] = p.resolution_bits;
    j["objective"] = p.objective();
    j["pareto"] = p.pareto;
    return j;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

Provenance provenance_of(const config::RunConfig& cfg) {
    Provenance prov;
    prov.seed = cfg.seed;
    prov.config_hash = fnv1a_hex(config::emit_accelerator(cfg.accel) + "\n[inference]\nbits = " +
                                 std::to_string(cfg.inference.bits) +
                                 "\nmax_noise = " + format_double(cfg.inference.max_noise) + "\n");
    return prov;
}

std::string format_double(double v) { return fmt::format("{}", v); }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
        }
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

std::string metrics_json(const Provenance& prov, const std::string& model_name, const dse::ConfigKey& key,
                         const perf::MetricsReport& m, const std::optional<InferenceOutcome>& inference) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["model"] = model_name;
    j["config"] = key_json(key);
    ordered_json metrics;
    metrics["latency_s"] = m.latency_s;
    metrics["fps"] = m.fps;
    metrics["total_power_mw"] = m.total_power_mw;
    metrics["energy_per_bit_pj"] = m.energy_per_bit_pj;
    metrics["kfps_per_watt"] = m.kfps_per_watt;
    metrics["area_mm2"] = m.area_mm2;
    metrics["resolution_bits"] = m.resolution_bits;
    metrics["power"] = power_json(m.power);
    j["metrics"] = metrics;
    if (inference) {
        ordered_json inf;
        inf["outputs"] = inference->outputs;
        inf["predicted"] = inference->predicted;
        j["inference"] = inf;
    }
    return j.dump(2) + "\n";
}

std::string metrics_csv(const Provenance& prov, const std::string& model_name, const dse::ConfigKey& key,
                        const perf::MetricsReport& m) {
    std::string out = csv_header(prov);
    out += "model,N,K,n,m,variant,latency_s,fps,total_power_mw,energy_per_bit_pj,kfps_per_watt,area_mm2,"
           "resolution_bits,laser_mw,to_tuning_mw,eo_tuning_mw,pd_mw,tia_mw,vcsel_mw,converters_mw\n";
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", model_name, key_cells(key), m.latency_s,
                       m.fps, m.total_power_mw, m.energy_per_bit_pj, m.kfps_per_watt, m.area_mm2, m.resolution_bits,
                       m.power.laser_mw, m.power.to_tuning_mw, m.power.eo_tuning_mw, m.power.pd_mw, m.power.tia_mw,
                       m.power.vcsel_mw, m.power.converters_mw);
    return out;
}

std::string sweep_csv(const Provenance& prov, const dse::SweepResult& result) {
    std::string out = csv_header(prov);
    out += "N,K,n,m,variant,avg_fps,avg_epb_pj,avg_latency_s,avg_power_mw,area_mm2,resolution_bits,objective,"
           "over_area_cap,pareto\n";
    for (const auto& p : result.points) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", key_cells(p.key), p.avg_fps, p.avg_epb_pj,
                           p.avg_latency_s, p.avg_power_mw, p.area_mm2, p.resolution_bits, p.objective(),
                           p.over_area_cap ? 1 : 0, p.pareto ? 1 : 0);
    }
    return out;
}

std::string best_json(const Provenance& prov, const dse::SweepResult& result, const dse::SweepPoint* best) {
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["objective"] = "avg_fps / avg_epb_pj";
    j["area_cap_mm2"] = result.area_cap_mm2 ? ordered_json(*result.area_cap_mm2) : ordered_json(nullptr);
    j["evaluated"] = result.points.size();
    j["best"] = best ? point_json(*best) : ordered_json(nullptr);
    ordered_json pareto = ordered_json::array();
    for (const auto& p : result.points) {
        if (p.pareto) {
            pareto.push_back(key_json(p.key));
        }
    }
    j["pareto"] = pareto;
    ordered_json skipped = ordered_json::array();
    for (const auto& s : result.skipped) {
        ordered_json e = key_json(s.key);
        e["reason"] = s.reason;
        skipped.push_back(e);
    }
    j["skipped"] = skipped;
    return j.dump(2) + "\n";
}

std::string resolution_csv(const Provenance& prov, const std::vector<ResolutionRow>& rows) {
    std::string out = csv_header(prov);
    out += "channels,spacing_nm,max_noise_power,resolution_levels,resolution_bits,claimed_bits\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.channels, r.spacing_nm, r.max_noise_power, r.resolution_levels,
                           r.resolution_bits, kClaimedResolutionBits);
    }
    return out;
}

std::string ted_csv(const Provenance& prov, const std::vector<TedRow>& rows) {
    std::string out = csv_header(prov);
    out += "pitch_um,naive_power_mw,ted_power_mw,naive_converged,naive_iterations,condition\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.pitch_um, r.naive_power_mw ? format_double(*r.naive_power_mw) : "",
                           r.ted_power_mw, r.naive_power_mw ? 1 : 0, r.naive_iterations, r.condition);
    }
    return out;
}

std::string compare_csv(const Provenance& prov, const dse::VariantTable& table) {
    std::string out = csv_header(prov);
    out += "# seeds " + std::to_string(table.seeds) + "\n";
    if (table.rows.size() == 4 && table.rows.front().epb_pj > 0.0) {
        const auto& refs = dse::reference_rows();
        const double reference = refs[refs.size() - 1].epb_pj / refs[refs.size() - 4].epb_pj;
        out += "# epb_ratio_opt_ted_over_base " + format_double(table.rows.back().epb_pj / table.rows.front().epb_pj) +
               " reference " + format_double(reference) + "\n";
    }
    out += "source,name,power_mw,to_tuning_mw,epb_pj,kfps_per_watt,fps\n";
    for (const auto& r : table.rows) {
        out += fmt::format("simulated,{},{},{},{},{},{}\n", r.name, r.power_mw, r.to_tuning_mw, r.epb_pj,
                           r.kfps_per_watt, r.fps);
    }
    for (const auto& r : dse::reference_rows()) {
        out += fmt::format("reference,{},,,{},{},\n", r.name, r.epb_pj, r.kfps_per_watt);
    }
    return out;
}

}  // namespace photosim::reports
