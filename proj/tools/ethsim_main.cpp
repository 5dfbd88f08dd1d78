// SPDX-License-Identifier: Apache-2.0
//
// ethsim — benchmark and verification driver.
//
//   ethsim bench     run the buffered/bufferless phase-latency comparison
//   ethsim loopback  push random frames through TX -> wire -> RX and verify
//   ethsim trace     dump a per-cycle CSV trace of a fixed scenario
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ethsim/bench.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string payloads;
    std::string designs;
    std::string sys_clk_mhz;
    std::string bus_width;
    std::string cdc_depth;
    std::string threshold;
    std::string copy_overhead;
    std::string dma_setup;
    std::string seed;
    std::string csv;
    bool copy_as_payload_phase = false;
    std::map<std::string, CLI::Option*> options;
};

void add_common_flags(CLI::App* sub, CommonFlags& f) {
    f.options["config"] =
        sub->add_option("--config", f.config_path, "plain-text key = value configuration file");
    f.options["payloads"] =
        sub->add_option("--payloads", f.payloads, "comma-separated payload sizes in bytes");
    f.options["designs"] =
        sub->add_option("--designs", f.designs, "buffered, bufferless or both");
    f.options["sys-clk-mhz"] =
        sub->add_option("--sys-clk-mhz", f.sys_clk_mhz, "system clock in MHz (default 50)");
    f.options["bus-width"] = sub->add_option("--bus-width", f.bus_width, "bus width in bytes");
    f.options["cdc-depth"] = sub->add_option("--cdc-depth", f.cdc_depth, "CDC FIFO depth in entries");
    f.options["threshold"] =
        sub->add_option("--threshold", f.threshold, "cut-through start threshold in bytes");
    f.options["copy-overhead"] = sub->add_option("--copy-overhead", f.copy_overhead,
                                                 "extra cycles per CPU-copied word (baseline)");
    f.options["dma-setup"] =
        sub->add_option("--dma-setup", f.dma_setup, "DMA request acceptance cycles");
    f.options["seed"] = sub->add_option("--seed", f.seed, "RNG seed");
    f.options["csv"] = sub->add_option("--csv", f.csv, "CSV output path (bench)");
    sub->add_flag("--copy-as-payload-phase", f.copy_as_payload_phase,
                  "attribute the baseline CPU copy to the payload phase instead of config");
}

ethsim::BenchConfig build_config(const CommonFlags& f) {
    ethsim::BenchConfig cfg;
    if (f.options.at("config")->count() > 0)
        cfg = ethsim::parse_config_file(f.config_path, cfg);

    const std::pair<const char*, const std::string*> direct[] = {
        {"payloads", &f.payloads},       {"designs", &f.designs},
        {"sys-clk-mhz", &f.sys_clk_mhz}, {"bus-width", &f.bus_width},
        {"cdc-depth", &f.cdc_depth},     {"threshold", &f.threshold},
        {"copy-overhead", &f.copy_overhead}, {"dma-setup", &f.dma_setup},
        {"seed", &f.seed},               {"csv", &f.csv},
    };
    for (const auto& [key, value] : direct)
        if (f.options.at(key)->count() > 0)
            ethsim::apply_config_entry(cfg, key, *value);
    if (f.copy_as_payload_phase)
        cfg.copy_as_payload_phase = true;
    cfg.validate();
    return cfg;
}

int cmd_bench(const CommonFlags& flags) {
    const ethsim::BenchConfig cfg = build_config(flags);
    const std::vector<ethsim::BenchRow> rows = ethsim::run_bench(cfg);

    std::ofstream csv(cfg.csv_path);
    if (!csv)
        throw ethsim::ConfigError("bench: cannot write CSV file '" + cfg.csv_path + "'");
    ethsim::write_csv(rows, csv);

    std::cout << ethsim::render_table(rows);
    std::cout << "csv written to " << cfg.csv_path << "\n";
    return 0;
}

int cmd_loopback(const CommonFlags& flags, std::uint32_t frames) {
    const ethsim::BenchConfig cfg = build_config(flags);
    const ethsim::LoopbackResult res = ethsim::run_loopback(frames, cfg);
    std::printf("loopback: %u frames, %u payload mismatches, %u FCS failures, %u tx errors, %u timeouts\n",
                res.frames, res.payload_mismatches, res.fcs_failures, res.tx_errors, res.timeouts);
    std::printf("%s\n", res.pass() ? "PASS" : "FAIL");
    return res.pass() ? 0 : 1;
}

int cmd_trace(const CommonFlags& flags, const std::string& scenario, const std::string& out_path) {
    const ethsim::BenchConfig cfg = build_config(flags);
    ethsim::run_trace(scenario, out_path, cfg);
    std::cout << "trace written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cycle-level gigabit Ethernet controller simulator"};
    app.require_subcommand(1);

    CommonFlags bench_flags;
    CLI::App* bench = app.add_subcommand("bench", "phase-latency comparison across payload sizes");
    add_common_flags(bench, bench_flags);

    CommonFlags loop_flags;
    std::uint32_t frames = 1000;
    CLI::App* loopback = app.add_subcommand("loopback", "random-frame TX/RX integrity check");
    loopback->add_option("--frames", frames, "number of frames to send");
    add_common_flags(loopback, loop_flags);

    CommonFlags trace_flags;
    std::string scenario;
    std::string out_path = "trace.csv";
    CLI::App* trace = app.add_subcommand("trace", "per-cycle CSV trace of a scenario");
    trace->add_option("--scenario", scenario, "tx_256, tx_1024, rx_1024 or cdc_stress")->required();
    trace->add_option("--out", out_path, "output CSV path");
    add_common_flags(trace, trace_flags);

    try {
        app.parse(argc, argv);
        if (bench->parsed())
            return cmd_bench(bench_flags);
        if (loopback->parsed())
            return cmd_loopback(loop_flags, frames);
        if (trace->parsed())
            return cmd_trace(trace_flags, scenario, out_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ethsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
