// SPDX-License-Identifier: Apache-2.0
//
// System-side resources: a byte-addressable memory with per-beat access
// latency and the controller's memory-mapped register file.
//
// Register map (32-bit registers, byte offsets):
//   0x00 MAC_LO      MAC address bits [31:0]
//   0x04 MAC_HI      MAC address bits [47:32] in [15:0], upper half reserved
//   0x08 TX_SRC_LO   transmit source address, low word
//   0x0C TX_SRC_HI   transmit source address, high word
//   0x10 TX_LEN      frame content length in bytes (header + payload)
//   0x14 TX_START    write 1 to start; reads back 1 while busy, self-clears
//   0x18 RX_DST_LO   receive destination address, low word
//   0x1C RX_DST_HI   receive destination address, high word
//   0x20 RX_BUF_LEN  receive capacity in bytes; writing arms the receiver
//   0x24 RX_STATUS   bit0 done, bit1 fcs_err, bit2 overflow, [31:16] rx_len
//   0x28 IRQ_EN      bit0 tx_done, bit1 rx_done, bit2 rx_fcs_err, bit3 tx_err
//   0x2C IRQ_STATUS  same bits, write-1-to-clear
// Offsets 0x30..0xFF are reserved: reads return 0, writes are ignored.
// The buffered baseline additionally maps its TX buffer at 0x1000..0x15FF
// and its RX buffer at 0x1800..0x1DFF.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ethsim/sim.hpp"

namespace ethsim {

namespace regs {
inline constexpr std::uint64_t kMacLo = 0x00;
inline constexpr std::uint64_t kMacHi = 0x04;
inline constexpr std::uint64_t kTxSrcLo = 0x08;
inline constexpr std::uint64_t kTxSrcHi = 0x0C;
inline constexpr std::uint64_t kTxLen = 0x10;
inline constexpr std::uint64_t kTxStart = 0x14;
inline constexpr std::uint64_t kRxDstLo = 0x18;
inline constexpr std::uint64_t kRxDstHi = 0x1C;
inline constexpr std::uint64_t kRxBufLen = 0x20;
inline constexpr std::uint64_t kRxStatus = 0x24;
inline constexpr std::uint64_t kIrqEn = 0x28;
inline constexpr std::uint64_t kIrqStatus = 0x2C;
inline constexpr std::uint64_t kWindowSize = 0x100;

inline constexpr std::uint32_t kRxDone = 1u << 0;
inline constexpr std::uint32_t kRxFcsErr = 1u << 1;
inline constexpr std::uint32_t kRxOverflow = 1u << 2;

inline constexpr std::uint32_t kIrqTxDone = 1u << 0;
inline constexpr std::uint32_t kIrqRxDone = 1u << 1;
inline constexpr std::uint32_t kIrqRxFcsErr = 1u << 2;
inline constexpr std::uint32_t kIrqTxErr = 1u << 3;

inline constexpr std::uint64_t kTxBufBase = 0x1000;
inline constexpr std::uint64_t kRxBufBase = 0x1800;
inline constexpr std::uint64_t kFrameBufBytes = 1536;
}  // namespace regs

// Single-port byte-addressable memory. Latencies are charged by the bus
// masters (DMA engine, scripted host), one beat per access slot.
class MemoryModel {
public:
    explicit MemoryModel(std::size_t size_bytes, unsigned read_latency_cycles = 1,
                         unsigned write_latency_cycles = 1);

    std::size_t size() const { return bytes_.size(); }
    unsigned read_latency() const { return read_latency_; }
    unsigned write_latency() const { return write_latency_; }

    // Throw BusFault when [addr, addr+len) is not inside the memory.
    void check_range(std::uint64_t addr, std::uint64_t len) const;
    void read(std::uint64_t addr, std::span<std::uint8_t> out) const;
    void write(std::uint64_t addr, std::span<const std::uint8_t> data);

private:
    std::vector<std::uint8_t> bytes_;
    unsigned read_latency_;
    unsigned write_latency_;
};

// Configuration register file. Writes performed during a tick are committed
// at the end of the edge; start pulses and arm events become visible to the
// controller sequencer on the following edge.
class RegisterFile final : public Component {
public:
    RegisterFile(Kernel& kernel, std::string name, DomainId domain);

    // Bus access, word-aligned. Unmapped offsets raise BusFault.
    std::uint32_t read32(std::uint64_t offset) const;
    void write32(std::uint64_t offset, std::uint32_t value);

    void tick() override {}
    void commit() override;

    // Controller-side state management.
    bool take_tx_start();   // true once per accepted start pulse
    bool take_rx_arm();
    void finish_tx(bool error);
    void finish_rx(std::size_t rx_len, bool fcs_err, bool overflow);

    bool tx_busy() const { return tx_busy_; }
    std::uint64_t tx_src() const;
    std::uint32_t tx_len() const { return reg_[kIdxTxLen]; }
    std::uint64_t rx_dst() const;
    std::uint32_t rx_buf_len() const { return reg_[kIdxRxBufLen]; }
    std::uint32_t rx_status() const { return reg_[kIdxRxStatus]; }
    std::uint32_t irq_status() const { return reg_[kIdxIrqStatus]; }
    bool irq_line() const { return (reg_[kIdxIrqStatus] & reg_[kIdxIrqEn]) != 0; }
    std::uint64_t warning_count() const { return warnings_; }

private:
    static constexpr std::size_t kIdxTxLen = 0x10 / 4;
    static constexpr std::size_t kIdxTxStart = 0x14 / 4;
    static constexpr std::size_t kIdxRxBufLen = 0x20 / 4;
    static constexpr std::size_t kIdxRxStatus = 0x24 / 4;
    static constexpr std::size_t kIdxIrqEn = 0x28 / 4;
    static constexpr std::size_t kIdxIrqStatus = 0x2C / 4;

    void apply_write(std::uint64_t offset, std::uint32_t value);
    void raise_irq(std::uint32_t bits);

    std::array<std::uint32_t, regs::kWindowSize / 4> reg_{};
    std::vector<std::pair<std::uint64_t, std::uint32_t>> staged_writes_;
    bool tx_busy_ = false;
    bool tx_start_pending_ = false;
    bool rx_arm_pending_ = false;
    std::uint64_t warnings_ = 0;
};

}  // namespace ethsim
