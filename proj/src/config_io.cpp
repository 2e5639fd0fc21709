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

#include "photosim/config_io.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string_view>
#include <variant>

#include <fmt/format.h>

#include "photosim/error.hpp"
#include "toml.hpp"

namespace photosim::config {

namespace {

using Slot = std::variant<double*, std::size_t*, int*, bool*>;

struct Entry {
    std::string_view section;
    std::string_view key;
    Slot slot;
};

// Every TOML-visible accelerator parameter, in emission order.
std::vector<Entry> entries(AcceleratorConfig& c) {
    return {
        {"architecture", "N", &c.N},
        {"architecture", "K", &c.K},
        {"architecture", "n", &c.n},
        {"architecture", "m", &c.m},
        {"architecture", "mrs_per_bank", &c.mrs_per_bank},
        {"architecture", "optimized_mr", &c.optimized_mr},
        {"architecture", "ted_enabled", &c.ted_enabled},
        {"device", "resonant_wavelength_nm", &c.device.resonant_wavelength_nm},
        {"device", "q_factor", &c.device.q_factor},
        {"device", "fsr_nm", &c.device.fsr_nm},
        {"tuning", "eo_power_uw_per_nm", &c.tuning.eo_power_uw_per_nm},
        {"tuning", "eo_latency_s", &c.tuning.eo_latency_s},
        {"tuning", "eo_max_range_nm", &c.tuning.eo_max_range_nm},
        {"tuning", "to_power_mw_per_fsr", &c.tuning.to_power_mw_per_fsr},
        {"tuning", "to_latency_s", &c.tuning.to_latency_s},
        {"thermal", "ratio_at_zero", &c.thermal.ratio_at_zero},
        {"thermal", "decay_length_um", &c.thermal.decay_length_um},
        {"thermal", "mr_pitch_um", &c.thermal.mr_pitch_um},
        {"losses", "propagation_db_per_cm", &c.losses.propagation_db_per_cm},
        {"losses", "splitter_db", &c.losses.splitter_db},
        {"losses", "combiner_db", &c.losses.combiner_db},
        {"losses", "mr_through_db", &c.losses.mr_through_db},
        {"losses", "mr_modulation_db", &c.losses.mr_modulation_db},
        {"losses", "eo_tuning_db_per_cm", &c.losses.eo_tuning_db_per_cm},
        {"losses", "to_tuning_db_per_cm", &c.losses.to_tuning_db_per_cm},
        {"link", "detector_sensitivity_dbm", &c.link.detector_sensitivity_dbm},
        {"link", "margin_db", &c.link.margin_db},
        {"link", "laser_wall_plug_efficiency", &c.link.laser_wall_plug_efficiency},
        {"link", "routing_length_cm", &c.link.routing_length_cm},
        {"link", "resolution_cap_bits", &c.link.resolution_cap_bits},
        {"converter", "rate_gbps", &c.converter.rate_gbps},
        {"converter", "power_mw", &c.converter.power_mw},
        {"aux", "vcsel_latency_s", &c.aux.vcsel_latency_s},
        {"aux", "vcsel_power_mw", &c.aux.vcsel_power_mw},
        {"aux", "tia_latency_s", &c.aux.tia_latency_s},
        {"aux", "tia_power_mw", &c.aux.tia_power_mw},
        {"aux", "pd_latency_s", &c.aux.pd_latency_s},
        {"aux", "pd_power_mw", &c.aux.pd_power_mw},
        {"fpv", "conventional_sigma_nm", &c.fpv.conventional_sigma_nm},
        {"fpv", "optimized_sigma_nm", &c.fpv.optimized_sigma_nm},
        {"solver", "condition_bound", &c.solver.condition_bound},
        {"solver", "naive_max_iterations", &c.solver.naive_max_iterations},
        {"solver", "naive_tolerance", &c.solver.naive_tolerance},
        {"area", "pd_mm2", &c.area.pd_mm2},
        {"area", "vcsel_mm2", &c.area.vcsel_mm2},
        {"area", "converter_mm2", &c.area.converter_mm2},
        {"area", "routing_factor", &c.area.routing_factor},
        {"perf", "activity_factor", &c.perf.activity_factor},
        {"perf", "electronic_layer_latency_s", &c.perf.electronic_layer_latency_s},
        {"perf", "group_index", &c.perf.group_index},
    };
}

// The MR loss figures live in [losses]; the device copy follows them.
void sync_device_losses(AcceleratorConfig& c) {
    c.device.through_loss_db = c.losses.mr_through_db;
    c.device.modulation_loss_db = c.losses.mr_modulation_db;
}

std::string qualified(std::string_view section, std::string_view key) {
    return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

double read_double(const toml::node& node, const std::string& path) {
    if (auto v = node.value_exact<double>()) return *v;
    if (auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw ValidationError(path + " must be a number");
}

std::int64_t read_integer(const toml::node& node, const std::string& path, std::int64_t lo, std::int64_t hi) {
    auto v = node.value_exact<std::int64_t>();
    if (!v) {
        throw ValidationError(path + " must be an integer");
    }
    if (*v < lo || *v > hi) {
        throw ValidationError(path + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return *v;
}

void read_slot(const toml::node& node, Slot slot, const std::string& path) {
    std::visit(
        [&](auto* target) {
            using T = std::remove_pointer_t<decltype(target)>;
            if constexpr (std::is_same_v<T, double>) {
                *target = read_double(node, path);
            } else if constexpr (std::is_same_v<T, bool>) {
                auto v = node.value_exact<bool>();
                if (!v) {
                    throw ValidationError(path + " must be a boolean");
                }
                *target = *v;
            } else if constexpr (std::is_same_v<T, int>) {
                *target = static_cast<int>(read_integer(node, path, std::numeric_limits<int>::min(),
                                                        std::numeric_limits<int>::max()));
            } else {
                *target = static_cast<std::size_t>(read_integer(node, path, 0, std::numeric_limits<std::int64_t>::max()));
            }
        },
        slot);
}

std::string format_slot(const Slot& slot) {
    return std::visit(
        [](auto* v) -> std::string {
            using T = std::remove_pointer_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return *v ? "true" : "false";
            } else {
                return fmt::format("{}", *v);
            }
        },
        slot);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    return out + "\"";
}

toml::table parse_toml(const std::string& text, const std::string& source) {
    try {
        return toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        const auto& where = e.source().begin;
        throw ConfigSyntaxError(source + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) +
                                ": " + std::string(e.description()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigMissingError(path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const toml::table& require_table(const toml::node& node, const std::string& path) {
    const auto* t = node.as_table();
    if (t == nullptr) {
        throw ValidationError(path + " must be a table");
    }
    return *t;
}

std::string read_string(const toml::node& node, const std::string& path) {
    auto v = node.value_exact<std::string>();
    if (!v) {
        throw ValidationError(path + " must be a string");
    }
    return *v;
}

}  // namespace

RunConfig parse_config_string(const std::string& text, const std::filesystem::path& base_dir) {
    const toml::table root = parse_toml(text, "config");
    RunConfig cfg;
    auto slots = entries(cfg.accel);
    std::set<std::string_view> sections;
    for (const auto& e : slots) {
        sections.insert(e.section);
    }

    for (const auto& [k, node] : root) {
        const std::string key(k.str());
        if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(
                read_integer(node, "seed", 0, std::numeric_limits<std::int64_t>::max()));
        } else if (key == "output_dir") {
            cfg.output_dir = read_string(node, "output_dir");
        } else if (key == "models") {
            const auto* arr = node.as_array();
            if (arr == nullptr) {
                throw ValidationError("models must be an array of paths");
            }
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const std::string path = "models[" + std::to_string(i) + "]";
                std::filesystem::path p = read_string((*arr)[i], path);
                if (p.is_relative()) {
                    p = base_dir / p;
                }
                p = std::filesystem::absolute(p).lexically_normal();
                if (!std::filesystem::is_regular_file(p)) {
                    throw ConfigMissingError(path + " = " + p.string());
                }
                cfg.models.push_back(p.string());
            }
        } else if (key == "inference") {
            for (const auto& [ik, inode] : require_table(node, "inference")) {
                const std::string ikey(ik.str());
                const std::string path = qualified("inference", ikey);
                if (ikey == "bits") {
                    cfg.inference.bits = static_cast<int>(read_integer(inode, path, 1, 16));
                } else if (ikey == "max_noise") {
                    cfg.inference.max_noise = read_double(inode, path);
                    if (!(cfg.inference.max_noise >= 0.0 && cfg.inference.max_noise < 1.0)) {
                        throw ValidationError(path + " must be in [0, 1)");
                    }
                } else {
                    throw ValidationError("unknown key " + path);
                }
            }
        } else if (sections.count(key) != 0) {
            for (const auto& [sk, snode] : require_table(node, key)) {
                const std::string skey(sk.str());
                const std::string path = qualified(key, skey);
                bool found = false;
                for (const auto& e : slots) {
                    if (e.section == key && e.key == skey) {
                        read_slot(snode, e.slot, path);
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    throw ValidationError("unknown key " + path);
                }
            }
        } else {
            throw ValidationError("unknown key " + key);
        }
    }
    sync_device_losses(cfg.accel);
    cfg.accel.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    return parse_config_string(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

std::string emit_accelerator(const AcceleratorConfig& cfg) {
    AcceleratorConfig copy = cfg;
    std::string out;
    std::string_view section;
    for (const auto& e : entries(copy)) {
        if (e.section != section) {
            section = e.section;
            out += (out.empty() ? "[" : "\n[") + std::string(section) + "]\n";
        }
        out += std::string(e.key) + " = " + format_slot(e.slot) + "\n";
    }
    return out;
}

std::string emit_config(const RunConfig& cfg) {
    std::string out = "seed = " + std::to_string(cfg.seed) + "\n";
    out += "output_dir = " + quote(cfg.output_dir) + "\n";
    out += "models = [";
    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
        out += (i ? ", " : "") + quote(cfg.models[i]);
    }
    out += "]\n\n";
    out += "[inference]\nbits = " + std::to_string(cfg.inference.bits) +
           "\nmax_noise = " + fmt::format("{}", cfg.inference.max_noise) + "\n\n";
    out += emit_accelerator(cfg.accel);
    return out;
}

void apply_env_overrides(RunConfig& cfg) {
    const char* value = std::getenv("PHOTOSIM_SEED");
    if (value == nullptr) {
        return;
    }
    const std::string s(value);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
        seed = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || s.front() == '-' ||
        seed > static_cast<unsigned long long>(std::numeric_limits<std::int64_t>::max())) {
        throw ValidationError("PHOTOSIM_SEED must be a non-negative integer (got '" + s + "')");
    }
    cfg.seed = seed;
}

dse::SweepGrid parse_grid_string(const std::string& text) {
    const toml::table root = parse_toml(text, "grid");
    dse::SweepGrid grid;
    auto read_axis = [](const toml::node& node, const std::string& key) {
        const auto* arr = node.as_array();
        if (arr == nullptr || arr->empty()) {
            throw ValidationError(key + " must be a non-empty array of integers");
        }
        std::vector<std::size_t> values;
        for (std::size_t i = 0; i < arr->size(); ++i) {
            values.push_back(static_cast<std::size_t>(
                read_integer((*arr)[i], key + "[" + std::to_string(i) + "]", 1, std::numeric_limits<std::int64_t>::max())));
        }
        return values;
    };
    for (const auto& [k, node] : root) {
        const std::string key(k.str());
        if (key == "N") {
            grid.N = read_axis(node, key);
        } else if (key == "K") {
            grid.K = read_axis(node, key);
        } else if (key == "n") {
            grid.n = read_axis(node, key);
        } else if (key == "m") {
            grid.m = read_axis(node, key);
        } else if (key == "variants") {
            const auto* arr = node.as_array();
            if (arr == nullptr) {
                throw ValidationError("variants must be an array of strings");
            }
            for (std::size_t i = 0; i < arr->size(); ++i) {
                grid.variants.push_back(dse::parse_variant(read_string((*arr)[i], "variants[" + std::to_string(i) + "]")));
            }
        } else if (key == "area_cap_mm2") {
            const double cap = read_double(node, key);
            if (!(cap > 0.0)) {
                throw ValidationError("area_cap_mm2 must be > 0");
            }
            grid.area_cap_mm2 = cap;
        } else {
            throw ValidationError("unknown key " + key);
        }
    }
    for (const auto& [name, axis] : {std::pair{"N", &grid.N}, std::pair{"K", &grid.K}, std::pair{"n", &grid.n},
                                     std::pair{"m", &grid.m}}) {
        if (axis->empty()) {
            throw ValidationError(std::string("grid axis ") + name + " is missing");
        }
    }
    return grid;
}

dse::SweepGrid parse_grid(const std::filesystem::path& path) {
    return parse_grid_string(read_file(path));
}

}  // namespace photosim::config
