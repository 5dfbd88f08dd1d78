// SPDX-License-Identifier: Apache-2.0
//
// Full-system controller compositions.
//
// BufferlessController: register file -> DMA engine -> dual-clock FIFO ->
// width sizer -> MAC, in both directions. No packet-sized storage exists
// anywhere on the path; only the CDC FIFOs hold data in flight.
//
// BufferedBaseline: the store-and-forward design it replaces. The CPU copies
// every frame word by word into a 1536-byte dual-port buffer behind the
// register window before transmission can start, and copies received frames
// out again.
//
// Both record the same four transaction phases in system-domain cycles:
// config (through the start-trigger register write, including any CPU buffer
// copy), preamble (through SFD on the wire), payload (through the last
// payload/pad octet) and crc. The phase boundaries are timestamps converted
// by ceiling division, so the four phases partition the transaction exactly.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ethsim/dma.hpp"
#include "ethsim/frame.hpp"
#include "ethsim/mac.hpp"
#include "ethsim/soc.hpp"
#include "ethsim/stream.hpp"

namespace ethsim {

struct PhaseLatencies {
    std::uint64_t config_cycles = 0;
    std::uint64_t preamble_cycles = 0;
    std::uint64_t payload_cycles = 0;
    std::uint64_t crc_cycles = 0;
    std::uint64_t total_cycles = 0;
    friend bool operator==(const PhaseLatencies&, const PhaseLatencies&) = default;
};

// Percentage reduction of the bufferless total against the buffered total.
double savings_percent(const PhaseLatencies& buffered, const PhaseLatencies& bufferless);

PhaseLatencies phases_from_boundaries(SimTime start, SimTime config_end, SimTime sfd,
                                      SimTime last_payload, SimTime crc_end,
                                      std::uint64_t sys_period_ps);

enum class TxFailure { none, buffer_overflow, underrun, timeout };
enum class RxFailure { none, overflow, timeout };

struct TxResult {
    TxFailure failure = TxFailure::none;
    PhaseLatencies phases;
    std::uint64_t wire_octets = 0;  // non-idle octets emitted by this transaction
    std::uint64_t copy_cycles = 0;  // CPU buffer-copy share of the config phase
};

struct RxResult {
    RxFailure failure = RxFailure::none;
    bool fcs_ok = false;
    std::size_t bytes = 0;  // frame content delivered (header + payload + pad)
    PhaseLatencies phases;
    std::uint64_t copy_cycles = 0;
};

struct ControllerConfig {
    std::uint32_t bus_width_bytes = 8;
    std::size_t cdc_depth = 32;
    unsigned sync_stages = 2;
    std::size_t cut_through_threshold = 16;
    unsigned dma_setup_cycles = 4;
    unsigned cpu_copy_overhead = 5;  // extra cycles per copied bus word
    std::size_t memory_bytes = 1 << 20;
    unsigned mem_read_latency = 1;
    unsigned mem_write_latency = 1;
    std::uint64_t tx_src_addr = 0x10000;
    std::uint64_t rx_dst_addr = 0x80000;
};

// CPU model: executes a scripted sequence of bus operations, one at a time,
// each occupying a fixed number of system cycles.
class ScriptedHost final : public Component {
public:
    struct Action {
        enum class Kind { reg_write, wait_bit, copy_to_window, copy_from_window };
        Kind kind = Kind::reg_write;
        std::uint64_t offset = 0;           // register offset (reg_write / wait_bit)
        std::uint32_t value = 0;            // write value or wait mask
        unsigned cycles = 1;                // cost per operation or per copied word
        std::vector<std::uint8_t> bytes;    // copy_to_window content
        bool trigger = false;               // completion time recorded as config end
    };

    using WordWriter = std::function<void(std::size_t word_index, std::span<const std::uint8_t>)>;
    using CopyOutFn = std::function<std::size_t()>;   // returns byte count to copy out
    using WordReader = std::function<void(std::size_t word_index, std::span<std::uint8_t>)>;

    ScriptedHost(Kernel& kernel, std::string name, DomainId domain, RegisterFile& regfile);

    void set_window_writer(WordWriter w) { window_writer_ = std::move(w); }
    void set_copy_out(CopyOutFn len_fn, WordReader reader, MemoryModel* mem, std::uint32_t word_bytes);

    void run(std::vector<Action> script);
    bool done() const { return script_.empty() && !active_; }
    SimTime trigger_time() const { return trigger_time_; }
    SimTime last_completion_time() const { return last_completion_time_; }
    std::uint64_t copy_cycles() const { return copy_cycles_; }
    std::uint64_t copy_out_dst() const { return copy_out_dst_; }
    void set_copy_out_dst(std::uint64_t addr) { copy_out_dst_ = addr; }

    void tick() override;

private:
    void complete_action();

    RegisterFile& regfile_;
    WordWriter window_writer_;
    CopyOutFn copy_out_len_;
    WordReader window_reader_;
    MemoryModel* copy_out_mem_ = nullptr;
    std::uint32_t word_bytes_ = 8;
    std::uint64_t copy_out_dst_ = 0;

    std::deque<Action> script_;
    std::optional<Action> active_;
    unsigned countdown_ = 0;
    std::size_t word_index_ = 0;
    std::size_t word_total_ = 0;
    std::size_t copy_out_bytes_ = 0;
    SimTime trigger_time_{};
    SimTime last_completion_time_{};
    std::uint64_t copy_cycles_ = 0;
};

struct TxParams {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ethertype = 0x0800;
    std::vector<std::uint8_t> payload;

    std::vector<std::uint8_t> content() const;  // dst | src | ethertype | payload
};

class Controller {
public:
    virtual ~Controller() = default;

    virtual TxFailure begin_tx(const TxParams& params) = 0;
    virtual bool tx_done() const = 0;
    virtual TxResult tx_result() const = 0;

    virtual void begin_rx(std::uint32_t capacity_bytes) = 0;
    virtual bool rx_armed() const = 0;
    virtual bool rx_done() const = 0;
    virtual RxResult rx_result() const = 0;

    virtual Wire& tx_wire() = 0;
    virtual Wire& rx_wire() = 0;
    virtual MemoryModel& memory() = 0;
    virtual RegisterFile& regfile() = 0;
    virtual const CdcFifo* tx_cdc() const { return nullptr; }
    virtual const CdcFifo* rx_cdc() const { return nullptr; }
};

class BufferlessController final : public Controller {
public:
    BufferlessController(Kernel& kernel, DomainId sys_domain, DomainId eth_domain,
                         ControllerConfig cfg = {}, Wire* shared_rx_wire = nullptr);

    TxFailure begin_tx(const TxParams& params) override;
    bool tx_done() const override;
    TxResult tx_result() const override;

    void begin_rx(std::uint32_t capacity_bytes) override;
    bool rx_armed() const override;
    bool rx_done() const override;
    RxResult rx_result() const override;

    Wire& tx_wire() override { return tx_wire_; }
    Wire& rx_wire() override { return *rx_wire_; }
    MemoryModel& memory() override { return memory_; }
    RegisterFile& regfile() override { return regfile_; }
    const CdcFifo* tx_cdc() const override { return &tx_fifo_; }
    const CdcFifo* rx_cdc() const override { return &rx_fifo_; }

private:
    class Sequencer final : public Component {
    public:
        Sequencer(Kernel& kernel, std::string name, DomainId domain, BufferlessController& c);
        void tick() override;

        bool tx_in_flight = false;
        bool rx_in_flight = false;
        std::uint64_t tx_completed = 0;
        std::uint64_t rx_completed = 0;
        std::uint64_t rx_base_seq = 0;
        std::size_t rx_bytes = 0;
        SimTime rx_end_time{};
        bool rx_overflowed = false;

    private:
        void finalize_rx(std::size_t bytes, bool fcs_err, bool overflow);
        std::uint64_t next_id_ = 1;
        std::uint64_t rx_req_id_ = 0;
        BufferlessController& c_;
    };

    Kernel& kernel_;
    ControllerConfig cfg_;
    std::uint64_t sys_period_ps_;

    MemoryModel memory_;
    RegisterFile regfile_;
    ScriptedHost host_;
    Wire tx_wire_;
    std::optional<Wire> own_rx_wire_;
    Wire* rx_wire_;

    CdcFifo tx_fifo_;
    StreamChannel tx_byte_chan_;
    DownSizer down_;
    MacTxEngine mac_tx_;

    StreamChannel rx_byte_chan_;
    CdcFifo rx_fifo_;
    MacRxEngine mac_rx_;
    UpSizer up_;

    DmaEngine dma_;
    Sequencer seq_;

    SimTime tx_begin_{};
    std::uint64_t tx_expected_ = 0;
    std::uint64_t tx_wire_base_ = 0;
    SimTime rx_begin_{};
    std::uint64_t rx_expected_ = 0;
};

class BufferedBaseline final : public Controller {
public:
    BufferedBaseline(Kernel& kernel, DomainId sys_domain, DomainId eth_domain,
                     ControllerConfig cfg = {}, Wire* shared_rx_wire = nullptr);

    TxFailure begin_tx(const TxParams& params) override;
    bool tx_done() const override;
    TxResult tx_result() const override;

    void begin_rx(std::uint32_t capacity_bytes) override;
    bool rx_armed() const override;
    bool rx_done() const override;
    RxResult rx_result() const override;

    Wire& tx_wire() override { return tx_wire_; }
    Wire& rx_wire() override { return *rx_wire_; }
    MemoryModel& memory() override { return memory_; }
    RegisterFile& regfile() override { return regfile_; }

private:
    // Dual-port frame buffer, CPU side in the system domain, MAC side in the
    // Ethernet domain.
    class TxBuffer final : public Component, public StreamSource {
    public:
        TxBuffer(Kernel& kernel, std::string name, DomainId eth_domain);
        void write_word(std::size_t word_index, std::span<const std::uint8_t> bytes,
                        std::uint32_t word_bytes);
        void arm(std::size_t len);  // staged, applied on the next Ethernet edge
        std::size_t bytes_written() const { return bytes_written_; }

        const StreamBeat* front() const override;
        void pop() override;
        void tick() override {}
        void commit() override;

    private:
        std::array<std::uint8_t, regs::kFrameBufBytes> bytes_{};
        std::size_t bytes_written_ = 0;
        std::size_t len_ = 0;
        std::size_t cursor_ = 0;
        bool armed_ = false;
        std::optional<std::size_t> staged_arm_;
        mutable StreamBeat scratch_;
    };

    class RxBuffer final : public Component, public StreamSink {
    public:
        RxBuffer(Kernel& kernel, std::string name, DomainId eth_domain);
        bool can_push() const override { return fill_ < bytes_.size(); }
        void push(const StreamBeat& beat) override;
        void read_bytes(std::size_t byte_offset, std::span<std::uint8_t> out) const;
        std::size_t fill() const { return fill_; }
        void clear() { fill_ = 0; }
        void tick() override {}

    private:
        std::array<std::uint8_t, regs::kFrameBufBytes> bytes_{};
        std::size_t fill_ = 0;
    };

    class Sequencer final : public Component {
    public:
        Sequencer(Kernel& kernel, std::string name, DomainId domain, BufferedBaseline& c);
        void tick() override;

        bool tx_in_flight = false;
        bool rx_in_flight = false;
        std::uint64_t tx_completed = 0;
        std::uint64_t rx_completed = 0;
        std::uint64_t rx_base_seq = 0;
        std::size_t rx_bytes = 0;
        bool rx_overflowed = false;

    private:
        BufferedBaseline& c_;
    };

    Kernel& kernel_;
    ControllerConfig cfg_;
    std::uint64_t sys_period_ps_;

    MemoryModel memory_;
    RegisterFile regfile_;
    ScriptedHost host_;
    Wire tx_wire_;
    std::optional<Wire> own_rx_wire_;
    Wire* rx_wire_;

    TxBuffer tx_buf_;
    RxBuffer rx_buf_;
    MacTxEngine mac_tx_;
    MacRxEngine mac_rx_;
    Sequencer seq_;

    SimTime tx_begin_{};
    std::uint64_t tx_expected_ = 0;
    std::uint64_t tx_wire_base_ = 0;
    std::uint64_t tx_copy_base_ = 0;
    SimTime rx_begin_{};
    std::uint64_t rx_expected_ = 0;
    std::uint64_t rx_copy_base_ = 0;
};

// Drives one complete transmit transaction and waits for it to finish.
TxResult run_tx_transaction(Kernel& kernel, Controller& controller, const TxParams& params,
                            SimTime max_time);

// Arms the receiver, injects the frame on the controller's receive wire and
// waits for delivery.
RxResult run_rx_transaction(Kernel& kernel, Controller& controller, FrameInjector& injector,
                            const WireFrame& frame, std::uint32_t capacity_bytes, SimTime max_time);

}  // namespace ethsim
