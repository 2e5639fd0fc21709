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

#include "photosim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "photosim/config_io.hpp"
#include "photosim/devices.hpp"
#include "photosim/dse.hpp"
#include "photosim/error.hpp"
#include "photosim/link_budget.hpp"
#include "photosim/perf_models.hpp"
#include "photosim/reports.hpp"
#include "photosim/vdp_engine.hpp"
#include "photosim/workload.hpp"

namespace photosim::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTedBankSize = 10;

struct Options {
    std::string config;
    std::string model;
    std::string models;
    std::string out;
    std::string grid;
    std::string input;
    std::string channels = "1..15";
    std::string pitch = "1..20";
    int bits = 0;
    std::size_t jobs = 1;
    std::size_t seeds = 100;
};

config::RunConfig load_run_config(const Options& opt) {
    config::RunConfig cfg = opt.config.empty() ? config::RunConfig{} : config::parse_config(opt.config);
    config::apply_env_overrides(cfg);
    return cfg;
}

fs::path output_dir(const Options& opt, const config::RunConfig& cfg) {
    return opt.out.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        if (comma > start) {
            parts.push_back(text.substr(start, comma - start));
        }
        start = comma + 1;
    }
    return parts;
}

std::vector<workload::ModelSpec> load_models(const std::vector<std::string>& paths) {
    std::vector<workload::ModelSpec> models;
    for (const auto& p : paths) {
        if (!fs::is_regular_file(p)) {
            throw ConfigMissingError("model " + p);
        }
        models.push_back(workload::load_model(p));
    }
    return models;
}

std::vector<double> read_input(const fs::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigMissingError("input " + path.string());
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected * sizeof(float)) {
        throw LoweringError("input " + path.string() + " holds " + std::to_string(bytes.size()) + " bytes, expected " +
                            std::to_string(expected) + " float32 values");
    }
    std::vector<double> values(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        float f;
        std::memcpy(&f, bytes.data() + i * sizeof(float), sizeof(float));
        values[i] = f;
    }
    return values;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
    auto cfg = load_run_config(opt);
    if (opt.bits != 0) {
        cfg.inference.bits = opt.bits;
    }
    std::string model_path = opt.model;
    if (model_path.empty()) {
        if (cfg.models.empty()) {
            throw ConfigMissingError("no model given (use --model or models in the config)");
        }
        model_path = cfg.models.front();
    }
    const auto model = load_models({model_path}).front();
    const auto metrics = perf::evaluate(model, cfg.accel, cfg.seed);
    if (cfg.inference.bits > metrics.resolution_bits) {
        err << "photosim: warning: " << cfg.inference.bits << "-bit operands exceed the " << metrics.resolution_bits
            << "-bit crosstalk-limited link resolution\n";
    }

    std::optional<reports::InferenceOutcome> inference;
    if (!opt.input.empty()) {
        const auto weights = workload::load_weights(model);
        const auto input = read_input(opt.input, model.input.size());
        vdp::InferenceOptions inf;
        inf.bits = cfg.inference.bits;
        if (cfg.inference.max_noise > 0.0) {
            inf.max_noise = cfg.inference.max_noise;
        }
        inf.seed = cfg.seed;
        reports::InferenceOutcome outcome;
        outcome.outputs = vdp::execute_model(model, weights, input, cfg.accel, inf);
        outcome.predicted = static_cast<std::size_t>(
            std::max_element(outcome.outputs.begin(), outcome.outputs.end()) - outcome.outputs.begin());
        inference = std::move(outcome);
    }

    const auto prov = reports::provenance_of(cfg);
    const auto key = dse::key_of(cfg.accel);
    const fs::path dir = output_dir(opt, cfg);
    reports::write_atomic(dir / "metrics.json", reports::metrics_json(prov, model.name, key, metrics, inference));
    reports::write_atomic(dir / "metrics.csv", reports::metrics_csv(prov, model.name, key, metrics));
    out << model.name << ": fps " << reports::format_double(metrics.fps) << ", epb "
        << reports::format_double(metrics.energy_per_bit_pj) << " pJ/bit, power "
        << reports::format_double(metrics.total_power_mw) << " mW, area " << reports::format_double(metrics.area_mm2)
        << " mm2\n";
    return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
    auto cfg = load_run_config(opt);
    std::vector<std::string> paths = opt.models.empty() ? cfg.models : split_list(opt.models);
    if (paths.empty()) {
        throw ConfigMissingError("no models given (use --models or models in the config)");
    }
    const auto grid = config::parse_grid(opt.grid);
    const auto models = load_models(paths);
    const auto result = dse::sweep(grid, models, cfg.accel, cfg.seed, opt.jobs);
    for (const auto& s : result.skipped) {
        err << "photosim: skipped N=" << s.key.N << " K=" << s.key.K << " n=" << s.key.n << " m=" << s.key.m << " "
            << dse::variant_name(s.key.flags) << ": " << s.reason << "\n";
    }
    const auto prov = reports::provenance_of(cfg);
    const fs::path dir = output_dir(opt, cfg);
    if (result.points.empty()) {
        throw InfeasibleError("no admissible configuration in the grid");
    }
    const dse::SweepPoint* best = nullptr;
    std::optional<InfeasibleError> infeasible;
    try {
        best = &dse::select_best(result);
    } catch (const InfeasibleError& e) {
        infeasible = e;
    }
    reports::write_atomic(dir / "sweep.csv", reports::sweep_csv(prov, result));
    reports::write_atomic(dir / "best.json", reports::best_json(prov, result, best));
    if (infeasible) {
        throw *infeasible;
    }
    out << "best: N=" << best->key.N << " K=" << best->key.K << " n=" << best->key.n << " m=" << best->key.m << " "
        << dse::variant_name(best->key.flags) << " fps/epb " << reports::format_double(best->objective()) << "\n";
    return kExitOk;
}

int cmd_resolution(const Options& opt, std::ostream& out) {
    const auto cfg = load_run_config(opt);
    std::vector<reports::ResolutionRow> rows;
    for (std::size_t channels : parse_range(opt.channels)) {
        const auto grid = link::WavelengthGrid::uniform(channels, cfg.accel.device.resonant_wavelength_nm,
                                                        cfg.accel.device.fsr_nm, cfg.accel.device.q_factor);
        const auto rep = link::grid_resolution(grid, cfg.accel.link.resolution_cap_bits);
        rows.push_back({channels, cfg.accel.device.fsr_nm / static_cast<double>(channels), rep.max_noise_power,
                        rep.resolution_levels, rep.resolution_bits});
    }
    const std::string csv = reports::resolution_csv(reports::provenance_of(cfg), rows);
    if (!opt.out.empty()) {
        reports::write_atomic(fs::path(opt.out) / "resolution.csv", csv);
    }
    out << csv;
    return kExitOk;
}

int cmd_ted(const Options& opt, std::ostream& out) {
    const auto cfg = load_run_config(opt);
    const auto& a = cfg.accel;
    const auto drifts = devices::sample_fpv_drift(kTedBankSize, a.effective_device(), cfg.seed);
    std::vector<double> desired;
    for (double d : drifts.drifts_nm) {
        desired.push_back(devices::drift_to_phase(std::abs(d), a.device.fsr_nm));
    }
    std::vector<reports::TedRow> rows;
    for (std::size_t p : parse_range(opt.pitch)) {
        auto thermal = a.thermal;
        thermal.mr_pitch_um = static_cast<double>(p);
        const auto matrix = devices::build_crosstalk_matrix(kTedBankSize, thermal);
        const devices::TedSolver solver(matrix, a.tuning.to_power_mw_per_fsr, {a.solver.condition_bound});
        reports::TedRow row;
        row.pitch_um = thermal.mr_pitch_um;
        row.ted_power_mw = solver.solve(desired).total_power_mw;
        row.condition = solver.condition_estimate();
        try {
            const auto naive = devices::naive_compensation(matrix, desired, a.tuning.to_power_mw_per_fsr,
                                                           {a.solver.naive_max_iterations, a.solver.naive_tolerance});
            row.naive_power_mw = naive.power_mw;
            row.naive_iterations = naive.iterations;
        } catch (const DivergenceError&) {
            row.naive_iterations = a.solver.naive_max_iterations;
        }
        rows.push_back(row);
    }
    const std::string csv = reports::ted_csv(reports::provenance_of(cfg), rows);
    if (!opt.out.empty()) {
        reports::write_atomic(fs::path(opt.out) / "ted.csv", csv);
    }
    out << csv;
    return kExitOk;
}

int cmd_compare(const Options& opt, std::ostream& out) {
    const auto cfg = load_run_config(opt);
    std::vector<std::string> paths = opt.models.empty() ? cfg.models : split_list(opt.models);
    if (paths.empty()) {
        throw ConfigMissingError("no models given (use --models or models in the config)");
    }
    if (opt.seeds == 0) {
        throw ValidationError("--seeds must be >= 1");
    }
    const auto table = dse::compare_variants(load_models(paths), cfg.accel, opt.seeds, cfg.seed);
    const std::string csv = reports::compare_csv(reports::provenance_of(cfg), table);
    if (!opt.out.empty()) {
        reports::write_atomic(fs::path(opt.out) / "compare.csv", csv);
    }
    out << csv;
    return kExitOk;
}

}  // namespace

std::vector<std::size_t> parse_range(const std::string& text) {
    auto number = [&](const std::string& s) -> std::size_t {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || s.front() == '-' || v == 0) {
            throw ValidationError("range '" + text + "' must list positive integers");
        }
        return static_cast<std::size_t>(v);
    };
    std::vector<std::size_t> values;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::size_t lo = number(text.substr(0, dots));
        const std::size_t hi = number(text.substr(dots + 2));
        if (hi < lo) {
            throw ValidationError("range '" + text + "' is empty");
        }
        for (std::size_t v = lo; v <= hi; ++v) {
            values.push_back(v);
        }
    } else {
        for (const auto& part : split_list(text)) {
            values.push_back(number(part));
        }
    }
    if (values.empty()) {
        throw ValidationError("range '" + text + "' is empty");
    }
    return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photonic accelerator simulator", "photosim"};
    app.require_subcommand(1);
    Options opt;

    auto* simulate = app.add_subcommand("simulate", "Evaluate one configuration on one model");
    simulate->add_option("--config", opt.config, "Run configuration (TOML)");
    simulate->add_option("--model", opt.model, "Model description (JSON)");
    simulate->add_option("--out", opt.out, "Output directory");
    simulate->add_option("--bits", opt.bits, "Operand bits for inference")->check(CLI::Range(1, 16));
    simulate->add_option("--input", opt.input, "Input tensor (little-endian float32) to run through the model");

    auto* sweep = app.add_subcommand("sweep", "Grid design-space exploration");
    sweep->add_option("--config", opt.config, "Run configuration (TOML)");
    sweep->add_option("--grid", opt.grid, "Sweep grid (TOML)")->required();
    sweep->add_option("--models", opt.models, "Comma-separated model descriptions");
    sweep->add_option("--out", opt.out, "Output directory");
    sweep->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));

    auto* resolution = app.add_subcommand("resolution", "Crosstalk-limited resolution per channel count");
    resolution->add_option("--config", opt.config, "Run configuration (TOML)");
    resolution->add_option("--channels", opt.channels, "Channel counts, a..b or a,b,c");
    resolution->add_option("--out", opt.out, "Also write resolution.csv here");

    auto* ted = app.add_subcommand("ted", "Naive vs collective heater power per MR pitch");
    ted->add_option("--config", opt.config, "Run configuration (TOML)");
    ted->add_option("--pitch", opt.pitch, "Pitches in um, a..b or a,b,c");
    ted->add_option("--out", opt.out, "Also write ted.csv here");

    auto* compare = app.add_subcommand("compare", "Four-variant comparison table");
    compare->add_option("--config", opt.config, "Run configuration (TOML)");
    compare->add_option("--models", opt.models, "Comma-separated model descriptions");
    compare->add_option("--seeds", opt.seeds, "FPV draws to average over");
    compare->add_option("--out", opt.out, "Also write compare.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(opt, out, err);
        if (*sweep) return cmd_sweep(opt, out, err);
        if (*resolution) return cmd_resolution(opt, out);
        if (*ted) return cmd_ted(opt, out);
        if (*compare) return cmd_compare(opt, out);
    } catch (const Error& e) {
        err << "photosim: error: " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        err << "photosim: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace photosim::cli
