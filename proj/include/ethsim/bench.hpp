// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness: runs the phase-latency comparison between the buffered
// and bufferless controllers over a set of payload sizes, the random-frame
// loopback verification, and the per-cycle trace scenarios. All runs are
// deterministic for a fixed configuration and seed.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ethsim/controller.hpp"

namespace ethsim {

enum class DesignSelection { buffered, bufferless, both };

struct BenchConfig {
    std::vector<std::uint32_t> payloads{256, 512, 1024};
    DesignSelection designs = DesignSelection::both;
    std::uint32_t sys_clk_mhz = 50;
    std::uint32_t bus_width = 8;
    std::uint32_t cdc_depth = 32;
    std::uint32_t threshold = 16;      // cut-through start threshold, bytes
    std::uint32_t copy_overhead = 5;   // extra cycles per CPU-copied word
    std::uint32_t dma_setup = 4;
    std::uint64_t seed = 1;
    std::string csv_path = "bench.csv";
    bool copy_as_payload_phase = false;

    void validate() const;
    std::uint64_t sys_period_ps() const;
    ControllerConfig controller_config() const;
};

// Applies one `key = value` pair using the CLI flag spellings (payloads,
// designs, sys-clk-mhz, bus-width, cdc-depth, threshold, copy-overhead,
// dma-setup, seed, csv, copy-as-payload-phase).
void apply_config_entry(BenchConfig& cfg, const std::string& key, const std::string& value);

// Plain-text `key = value` file; '#' starts a comment.
BenchConfig parse_config_file(const std::string& path, BenchConfig base = {});

struct BenchRow {
    std::string design;
    std::uint32_t payload_bytes = 0;
    std::string phase;               // config, preamble, payload, crc or total
    std::uint64_t cycles = 0;
    std::string status = "ok";
    std::optional<double> savings_pct;  // on bufferless total rows when both designs ran
};

std::vector<BenchRow> run_bench(const BenchConfig& cfg);
void write_csv(const std::vector<BenchRow>& rows, std::ostream& out);
std::string render_table(const std::vector<BenchRow>& rows);

struct LoopbackResult {
    std::uint32_t frames = 0;
    std::uint32_t payload_mismatches = 0;
    std::uint32_t fcs_failures = 0;
    std::uint32_t tx_errors = 0;
    std::uint32_t timeouts = 0;

    bool pass() const {
        return payload_mismatches == 0 && fcs_failures == 0 && tx_errors == 0 && timeouts == 0;
    }
};

// Random frames (payload 46..1500) through bufferless TX -> wire -> RX on a
// second instance; payloads are compared byte for byte at the destination.
LoopbackResult run_loopback(std::uint32_t frames, const BenchConfig& cfg);

// Scenarios: tx_256, tx_1024, rx_1024, cdc_stress. Throws ConfigError for an
// unknown scenario or an unwritable output path.
void run_trace(const std::string& scenario, const std::string& out_path, const BenchConfig& cfg);

}  // namespace ethsim
