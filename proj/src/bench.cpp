// SPDX-License-Identifier: Apache-2.0

#include "ethsim/bench.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

namespace ethsim {
namespace {

constexpr std::uint64_t kRunHorizonPs = 20'000'000'000ull;  // 20 ms of simulated time

const MacAddress kBenchDst{{0x52, 0x54, 0x00, 0x12, 0x34, 0x56}};
const MacAddress kBenchSrc{{0x02, 0x00, 0x00, 0xAB, 0xCD, 0xEF}};

std::vector<std::uint8_t> random_payload(std::mt19937_64& rng, std::size_t len) {
    std::vector<std::uint8_t> bytes(len);
    for (auto& b : bytes)
        b = static_cast<std::uint8_t>(rng() & 0xFF);
    return bytes;
}

std::unique_ptr<Controller> make_controller(bool buffered, Kernel& kernel, DomainId sys,
                                            DomainId eth, const ControllerConfig& cfg,
                                            Wire* shared_rx = nullptr) {
    if (buffered)
        return std::make_unique<BufferedBaseline>(kernel, sys, eth, cfg, shared_rx);
    return std::make_unique<BufferlessController>(kernel, sys, eth, cfg, shared_rx);
}

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: invalid number '" + value + "' for " + key);
    }
}

}  // namespace

void BenchConfig::validate() const {
    if (payloads.empty())
        throw ConfigError("config: at least one payload size required");
    for (std::uint32_t p : payloads)
        if (p == 0)
            throw ConfigError("config: payload sizes must be >= 1");
    if (sys_clk_mhz == 0 || 1'000'000 % sys_clk_mhz != 0)
        throw ConfigError("config: system clock must divide 10^12 ps evenly (MHz value " +
                          std::to_string(sys_clk_mhz) + " rejected)");
    if (bus_width == 0 || bus_width > kMaxBeatBytes || !std::has_single_bit(bus_width))
        throw ConfigError("config: bus width must be a power of two in [1, 64]");
    if (bus_width < 2)
        throw ConfigError("config: bus width must exceed the 1-byte MAC interface");
    if (cdc_depth < 2 || !std::has_single_bit(cdc_depth))
        throw ConfigError("config: cdc depth must be a power of two >= 2");
    if (threshold == 0)
        throw ConfigError("config: cut-through threshold must be >= 1");
}

std::uint64_t BenchConfig::sys_period_ps() const {
    return kPicosPerSecond / (static_cast<std::uint64_t>(sys_clk_mhz) * 1'000'000ull);
}

ControllerConfig BenchConfig::controller_config() const {
    ControllerConfig c;
    c.bus_width_bytes = bus_width;
    c.cdc_depth = cdc_depth;
    c.cut_through_threshold = threshold;
    c.dma_setup_cycles = dma_setup;
    c.cpu_copy_overhead = copy_overhead;
    return c;
}

void apply_config_entry(BenchConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "payloads") {
        cfg.payloads.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty())
                cfg.payloads.push_back(static_cast<std::uint32_t>(parse_u64(key, item)));
        }
    } else if (key == "designs") {
        if (value == "buffered")
            cfg.designs = DesignSelection::buffered;
        else if (value == "bufferless")
            cfg.designs = DesignSelection::bufferless;
        else if (value == "both")
            cfg.designs = DesignSelection::both;
        else
            throw ConfigError("config: designs must be buffered, bufferless or both");
    } else if (key == "sys-clk-mhz") {
        cfg.sys_clk_mhz = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "bus-width") {
        cfg.bus_width = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "cdc-depth") {
        cfg.cdc_depth = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "threshold") {
        cfg.threshold = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "copy-overhead") {
        cfg.copy_overhead = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "dma-setup") {
        cfg.dma_setup = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
    } else if (key == "csv") {
        cfg.csv_path = value;
    } else if (key == "copy-as-payload-phase") {
        if (value == "true" || value == "1")
            cfg.copy_as_payload_phase = true;
        else if (value == "false" || value == "0")
            cfg.copy_as_payload_phase = false;
        else
            throw ConfigError("config: copy-as-payload-phase must be true or false");
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

BenchConfig parse_config_file(const std::string& path, BenchConfig base) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot read file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

namespace {

TxParams bench_params(const BenchConfig& cfg, bool buffered, std::uint32_t payload) {
    std::mt19937_64 rng(cfg.seed ^ (static_cast<std::uint64_t>(payload) * 0x9E3779B97F4A7C15ull) ^
                        (buffered ? 1 : 0));
    TxParams p;
    p.dst = kBenchDst;
    p.src = kBenchSrc;
    p.ethertype = 0x0800;
    p.payload = random_payload(rng, payload);
    return p;
}

PhaseLatencies reattribute_copy(PhaseLatencies phases, std::uint64_t copy_cycles) {
    const std::uint64_t moved = std::min(copy_cycles, phases.config_cycles);
    phases.config_cycles -= moved;
    phases.payload_cycles += moved;
    return phases;
}

struct DesignOutcome {
    bool ran = false;
    TxResult result;
};

DesignOutcome run_design(const BenchConfig& cfg, bool buffered, std::uint32_t payload) {
    Kernel kernel;
    const DomainId sys = kernel.add_domain("sys", cfg.sys_period_ps());
    const DomainId eth = kernel.add_domain("eth", kEthPeriodPs);
    auto ctrl = make_controller(buffered, kernel, sys, eth, cfg.controller_config());
    DesignOutcome out;
    out.ran = true;
    out.result = run_tx_transaction(kernel, *ctrl, bench_params(cfg, buffered, payload),
                                    SimTime{kRunHorizonPs});
    return out;
}

const char* failure_name(TxFailure f) {
    switch (f) {
    case TxFailure::none: return "ok";
    case TxFailure::buffer_overflow: return "buffer_overflow";
    case TxFailure::underrun: return "underrun";
    case TxFailure::timeout: return "timeout";
    }
    return "unknown";
}

void emit_rows(std::vector<BenchRow>& rows, const BenchConfig& cfg, const char* design,
               std::uint32_t payload, const TxResult& res, std::optional<double> savings) {
    if (res.failure != TxFailure::none) {
        rows.push_back({design, payload, "total", 0, failure_name(res.failure), {}});
        return;
    }
    PhaseLatencies ph = res.phases;
    if (cfg.copy_as_payload_phase)
        ph = reattribute_copy(ph, res.copy_cycles);
    rows.push_back({design, payload, "config", ph.config_cycles, "ok", {}});
    rows.push_back({design, payload, "preamble", ph.preamble_cycles, "ok", {}});
    rows.push_back({design, payload, "payload", ph.payload_cycles, "ok", {}});
    rows.push_back({design, payload, "crc", ph.crc_cycles, "ok", {}});
    rows.push_back({design, payload, "total", ph.total_cycles, "ok", savings});
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    cfg.validate();
    const bool want_buffered = cfg.designs != DesignSelection::bufferless;
    const bool want_bufferless = cfg.designs != DesignSelection::buffered;

    std::vector<BenchRow> rows;
    for (std::uint32_t payload : cfg.payloads) {
        DesignOutcome buffered, bufferless;
        if (want_buffered)
            buffered = run_design(cfg, true, payload);
        if (want_bufferless)
            bufferless = run_design(cfg, false, payload);

        std::optional<double> savings;
        if (buffered.ran && bufferless.ran && buffered.result.failure == TxFailure::none &&
            bufferless.result.failure == TxFailure::none)
            savings = savings_percent(buffered.result.phases, bufferless.result.phases);

        if (buffered.ran)
            emit_rows(rows, cfg, "buffered", payload, buffered.result, {});
        if (bufferless.ran)
            emit_rows(rows, cfg, "bufferless", payload, bufferless.result, savings);
    }
    return rows;
}

void write_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "design,payload_bytes,phase,cycles,status,savings_pct\n";
    for (const BenchRow& r : rows) {
        out << r.design << ',' << r.payload_bytes << ',' << r.phase << ',' << r.cycles << ','
            << r.status << ',';
        if (r.savings_pct)
            out << format_pct(*r.savings_pct);
        out << '\n';
    }
}

std::string render_table(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %8s %-10s %10s  %-16s %s\n", "design", "payload",
                  "phase", "cycles", "status", "savings");
    out << line;
    for (const BenchRow& r : rows) {
        std::snprintf(line, sizeof line, "%-12s %8u %-10s %10llu  %-16s %s\n", r.design.c_str(),
                      r.payload_bytes, r.phase.c_str(), static_cast<unsigned long long>(r.cycles),
                      r.status.c_str(),
                      r.savings_pct ? (format_pct(*r.savings_pct) + "%").c_str() : "");
        out << line;
    }
    return out.str();
}

LoopbackResult run_loopback(std::uint32_t frames, const BenchConfig& cfg) {
    cfg.validate();
    LoopbackResult result;
    result.frames = frames;
    if (frames == 0)
        return result;

    Kernel kernel;
    const DomainId sys = kernel.add_domain("sys", cfg.sys_period_ps());
    const DomainId eth = kernel.add_domain("eth", kEthPeriodPs);
    const ControllerConfig ccfg = cfg.controller_config();
    BufferlessController sender(kernel, sys, eth, ccfg);
    BufferlessController receiver(kernel, sys, eth, ccfg, &sender.tx_wire());

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> len_dist(kMinPayloadLen, kMaxPayloadLen);

    for (std::uint32_t i = 0; i < frames; ++i) {
        TxParams params;
        params.dst = kBenchDst;
        params.src = kBenchSrc;
        params.ethertype = 0x0800;
        params.payload = random_payload(rng, len_dist(rng));
        const std::vector<std::uint8_t> expected = params.content();

        const SimTime horizon{kernel.now().ps + kRunHorizonPs};
        receiver.begin_rx(static_cast<std::uint32_t>(kMaxPayloadLen + kHeaderLen));
        if (kernel.run_until([&] { return receiver.rx_armed(); }, horizon) == RunOutcome::timed_out) {
            result.timeouts++;
            break;
        }
        const TxResult tx = run_tx_transaction(kernel, sender, params, horizon);
        if (tx.failure == TxFailure::timeout) {
            result.timeouts++;
            break;
        }
        if (tx.failure != TxFailure::none)
            result.tx_errors++;
        if (kernel.run_until([&] { return receiver.rx_done(); }, horizon) == RunOutcome::timed_out) {
            result.timeouts++;
            break;
        }
        const RxResult rx = receiver.rx_result();
        if (!rx.fcs_ok)
            result.fcs_failures++;
        std::vector<std::uint8_t> delivered(rx.bytes);
        receiver.memory().read(ccfg.rx_dst_addr, delivered);
        if (delivered != expected)
            result.payload_mismatches++;
    }
    return result;
}

namespace {

// cdc_stress rig: random pushes and pops with stalls on both sides.
class StressProducer final : public Component {
public:
    StressProducer(Kernel& kernel, std::string name, DomainId domain, CdcFifo& fifo,
                   std::uint64_t seed, std::size_t items)
        : Component(std::move(name)), fifo_(fifo), rng_(seed), remaining_(items) {
        kernel.add_component(*this, domain);
    }
    void tick() override {
        if (remaining_ == 0 || (rng_() & 3) == 0 || !fifo_.can_push())
            return;
        std::array<std::uint8_t, 8> bytes{};
        for (auto& b : bytes)
            b = static_cast<std::uint8_t>(rng_() & 0xFF);
        fifo_.push(StreamBeat::make({bytes.data(), fifo_.width()}, fifo_.width(), remaining_ == 1));
        remaining_--;
    }
    bool done() const { return remaining_ == 0; }

private:
    CdcFifo& fifo_;
    std::mt19937_64 rng_;
    std::size_t remaining_;
};

class StressConsumer final : public Component {
public:
    StressConsumer(Kernel& kernel, std::string name, DomainId domain, CdcFifo& fifo,
                   std::uint64_t seed)
        : Component(std::move(name)), fifo_(fifo), rng_(seed) {
        kernel.add_component(*this, domain);
    }
    void tick() override {
        if ((rng_() & 3) == 0)
            return;
        if (fifo_.front()) {
            received_++;
            fifo_.pop();
        }
    }
    std::size_t received() const { return received_; }

private:
    CdcFifo& fifo_;
    std::mt19937_64 rng_;
    std::size_t received_ = 0;
};

}  // namespace

void run_trace(const std::string& scenario, const std::string& out_path, const BenchConfig& cfg) {
    cfg.validate();
    std::ofstream out(out_path);
    if (!out)
        throw ConfigError("trace: cannot write '" + out_path + "'");
    CsvTraceSink sink(out);

    Kernel kernel;
    const DomainId sys = kernel.add_domain("sys", cfg.sys_period_ps());
    const DomainId eth = kernel.add_domain("eth", kEthPeriodPs);

    if (scenario == "tx_256" || scenario == "tx_1024") {
        BufferlessController ctrl(kernel, sys, eth, cfg.controller_config());
        kernel.set_trace_sink(&sink);
        const std::uint32_t payload = scenario == "tx_256" ? 256 : 1024;
        const TxResult res =
            run_tx_transaction(kernel, ctrl, bench_params(cfg, false, payload), SimTime{kRunHorizonPs});
        if (res.failure != TxFailure::none)
            throw SimError("trace: transmit failed in scenario " + scenario);
    } else if (scenario == "rx_1024") {
        BufferlessController ctrl(kernel, sys, eth, cfg.controller_config());
        FrameInjector injector(kernel, "injector", eth, ctrl.rx_wire());
        kernel.set_trace_sink(&sink);
        EthernetFrame frame;
        frame.dst = kBenchDst;
        frame.src = kBenchSrc;
        frame.ethertype = 0x0800;
        std::mt19937_64 rng(cfg.seed);
        frame.payload = random_payload(rng, 1024);
        const RxResult res = run_rx_transaction(kernel, ctrl, injector, encode(frame), 2048,
                                                SimTime{kRunHorizonPs});
        if (res.failure != RxFailure::none)
            throw SimError("trace: receive failed in scenario " + scenario);
    } else if (scenario == "cdc_stress") {
        CdcFifo fifo(kernel, "stress_fifo", sys, eth, 8, {cfg.cdc_depth, 2});
        StressProducer producer(kernel, "producer", sys, fifo, cfg.seed, 2000);
        StressConsumer consumer(kernel, "consumer", eth, fifo, cfg.seed ^ 0xFEED);
        kernel.set_trace_sink(&sink);
        kernel.run_until([&] { return producer.done() && consumer.received() == 2000; },
                         SimTime{kRunHorizonPs});
    } else {
        throw ConfigError("trace: unknown scenario '" + scenario + "'");
    }
}

}  // namespace ethsim
