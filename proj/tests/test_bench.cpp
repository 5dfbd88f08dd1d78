// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ethsim/bench.hpp"

using namespace ethsim;

namespace {

std::size_t count_rows(const std::vector<BenchRow>& rows, const std::string& phase) {
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.phase == phase)
            n++;
    return n;
}

}  // namespace

TEST_CASE("default bench emits 24 data rows and 6 summary rows") {
    BenchConfig cfg;
    const auto rows = run_bench(cfg);
    CHECK(rows.size() == 30);
    CHECK(count_rows(rows, "total") == 6);
    CHECK(count_rows(rows, "config") == 6);
    CHECK(count_rows(rows, "preamble") == 6);
    CHECK(count_rows(rows, "payload") == 6);
    CHECK(count_rows(rows, "crc") == 6);

    // Summary totals equal the phase sums per (design, payload).
    for (const auto& total : rows) {
        if (total.phase != "total")
            continue;
        std::uint64_t sum = 0;
        for (const auto& r : rows)
            if (r.design == total.design && r.payload_bytes == total.payload_bytes &&
                r.phase != "total")
                sum += r.cycles;
        CHECK(sum == total.cycles);
    }

    // Savings recorded on the bufferless summary rows only.
    for (const auto& r : rows) {
        if (r.phase == "total" && r.design == "bufferless")
            CHECK(r.savings_pct.has_value());
        else
            CHECK(!r.savings_pct.has_value());
    }
}

TEST_CASE("default calibration reproduces savings above 50 percent") {
    BenchConfig cfg;
    const auto rows = run_bench(cfg);
    int checked = 0;
    for (const auto& r : rows)
        if (r.savings_pct) {
            CHECK(*r.savings_pct > 50.0);
            checked++;
        }
    CHECK(checked == 3);
}

TEST_CASE("reported savings match recomputation from the emitted totals") {
    BenchConfig cfg;
    const auto rows = run_bench(cfg);
    for (const auto& r : rows) {
        if (!r.savings_pct)
            continue;
        std::uint64_t buffered_total = 0;
        for (const auto& other : rows)
            if (other.design == "buffered" && other.payload_bytes == r.payload_bytes &&
                other.phase == "total")
                buffered_total = other.cycles;
        REQUIRE(buffered_total > 0);
        const PhaseLatencies b{0, 0, 0, 0, buffered_total};
        const PhaseLatencies f{0, 0, 0, 0, r.cycles};
        CHECK(*r.savings_pct == doctest::Approx(savings_percent(b, f)));
    }
}

TEST_CASE("an oversize payload yields an overflow row for the baseline only") {
    BenchConfig cfg;
    cfg.payloads = {2048};
    const auto rows = run_bench(cfg);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].design == "buffered");
    CHECK(rows[0].phase == "total");
    CHECK(rows[0].status == "buffer_overflow");
    CHECK(rows[0].cycles == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].design == "bufferless");
        CHECK(rows[i].status == "ok");
    }
}

TEST_CASE("bench output is byte-identical across runs") {
    BenchConfig cfg;
    std::ostringstream a, b;
    write_csv(run_bench(cfg), a);
    write_csv(run_bench(cfg), b);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("design selection restricts the rows") {
    BenchConfig cfg;
    cfg.payloads = {256};
    cfg.designs = DesignSelection::bufferless;
    const auto rows = run_bench(cfg);
    CHECK(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK(r.design == "bufferless");
        CHECK(!r.savings_pct.has_value());  // nothing to compare against
    }
}

TEST_CASE("copy reattribution moves cycles between phases, not totals") {
    BenchConfig cfg;
    cfg.payloads = {512};
    BenchConfig moved = cfg;
    moved.copy_as_payload_phase = true;
    const auto base_rows = run_bench(cfg);
    const auto moved_rows = run_bench(moved);
    std::uint64_t base_total = 0, moved_total = 0, base_cfg = 0, moved_cfg = 0;
    for (const auto& r : base_rows)
        if (r.design == "buffered" && r.phase == "total")
            base_total = r.cycles;
        else if (r.design == "buffered" && r.phase == "config")
            base_cfg = r.cycles;
    for (const auto& r : moved_rows)
        if (r.design == "buffered" && r.phase == "total")
            moved_total = r.cycles;
        else if (r.design == "buffered" && r.phase == "config")
            moved_cfg = r.cycles;
    CHECK(base_total == moved_total);
    CHECK(moved_cfg < base_cfg);
}

TEST_CASE("config validation rejects bad values") {
    BenchConfig cfg;
    cfg.payloads = {};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.payloads = {0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.sys_clk_mhz = 7;  // does not divide 10^12 evenly
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.bus_width = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    cfg.cdc_depth = 5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BenchConfig{};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config entries use the flag spellings") {
    BenchConfig cfg;
    apply_config_entry(cfg, "payloads", "64, 128,256");
    CHECK(cfg.payloads == std::vector<std::uint32_t>{64, 128, 256});
    apply_config_entry(cfg, "designs", "buffered");
    CHECK(cfg.designs == DesignSelection::buffered);
    apply_config_entry(cfg, "sys-clk-mhz", "100");
    CHECK(cfg.sys_clk_mhz == 100);
    apply_config_entry(cfg, "copy-overhead", "9");
    CHECK(cfg.copy_overhead == 9);
    apply_config_entry(cfg, "copy-as-payload-phase", "true");
    CHECK(cfg.copy_as_payload_phase);
    CHECK_THROWS_AS(apply_config_entry(cfg, "bogus-key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "seed", "12x"), ConfigError);
}

TEST_CASE("config files parse and missing files fail cleanly") {
    const auto path = std::filesystem::temp_directory_path() / "ethsim_test_cfg.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "payloads = 100,200\n";
        out << "seed = 42   # trailing comment\n";
        out << "\n";
        out << "threshold = 8\n";
    }
    const BenchConfig cfg = parse_config_file(path.string());
    CHECK(cfg.payloads == std::vector<std::uint32_t>{100, 200});
    CHECK(cfg.seed == 42);
    CHECK(cfg.threshold == 8);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/ethsim.cfg"), ConfigError);
}

TEST_CASE("loopback passes on a healthy configuration") {
    BenchConfig cfg;
    const LoopbackResult res = run_loopback(20, cfg);
    CHECK(res.frames == 20);
    CHECK(res.pass());
}

TEST_CASE("loopback with zero frames passes trivially") {
    BenchConfig cfg;
    CHECK(run_loopback(0, cfg).pass());
}

TEST_CASE("an unsustainable configuration reports underruns") {
    BenchConfig cfg;
    cfg.threshold = 1;
    cfg.sys_clk_mhz = 10;  // 80 MB/s cannot feed a 125 MB/s line
    const LoopbackResult res = run_loopback(5, cfg);
    CHECK(!res.pass());
    CHECK(res.tx_errors > 0);
}

TEST_CASE("trace scenarios write the expected wire rows") {
    const auto path = std::filesystem::temp_directory_path() / "ethsim_trace_test.csv";
    BenchConfig cfg;
    run_trace("tx_256", path.string(), cfg);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time_ps,domain,edge_index,component,event,value");
    std::size_t octet_rows = 0;
    bool occupancy_seen = false;
    while (std::getline(in, line)) {
        if (line.find(",tx_wire,octet,") != std::string::npos)
            octet_rows++;
        if (line.find(",occupancy,") != std::string::npos)
            occupancy_seen = true;
    }
    CHECK(octet_rows == 8 + 14 + 256 + 4);
    CHECK(occupancy_seen);
    std::filesystem::remove(path);
}

TEST_CASE("cdc_stress trace keeps occupancy within the configured depth") {
    const auto path = std::filesystem::temp_directory_path() / "ethsim_stress_test.csv";
    BenchConfig cfg;
    run_trace("cdc_stress", path.string(), cfg);
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto pos = line.find(",occupancy,");
        if (pos == std::string::npos)
            continue;
        rows++;
        const std::uint64_t occ = std::stoull(line.substr(pos + 11));
        CHECK(occ <= cfg.cdc_depth);
    }
    CHECK(rows > 0);
    std::filesystem::remove(path);
}

TEST_CASE("unknown scenarios and unwritable paths are config errors") {
    BenchConfig cfg;
    CHECK_THROWS_AS(run_trace("bogus", "/tmp/ethsim_x.csv", cfg), ConfigError);
    CHECK_THROWS_AS(run_trace("tx_256", "/nonexistent_dir/x.csv", cfg), ConfigError);
}
