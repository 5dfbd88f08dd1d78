// SPDX-License-Identifier: Apache-2.0

#include "ethsim/soc.hpp"

#include <algorithm>
#include <cstring>

namespace ethsim {

MemoryModel::MemoryModel(std::size_t size_bytes, unsigned read_latency_cycles,
                         unsigned write_latency_cycles)
    : bytes_(size_bytes, 0), read_latency_(read_latency_cycles), write_latency_(write_latency_cycles) {
    if (read_latency_ < 1 || write_latency_ < 1)
        throw ConfigError("memory: access latency must be at least one cycle per beat");
}

void MemoryModel::check_range(std::uint64_t addr, std::uint64_t len) const {
    if (addr > bytes_.size() || len > bytes_.size() - addr)
        throw BusFault("memory: access [" + std::to_string(addr) + ", +" + std::to_string(len) +
                       ") outside " + std::to_string(bytes_.size()) + " bytes");
}

void MemoryModel::read(std::uint64_t addr, std::span<std::uint8_t> out) const {
    check_range(addr, out.size());
    std::memcpy(out.data(), bytes_.data() + addr, out.size());
}

void MemoryModel::write(std::uint64_t addr, std::span<const std::uint8_t> data) {
    check_range(addr, data.size());
    std::memcpy(bytes_.data() + addr, data.data(), data.size());
}

RegisterFile::RegisterFile(Kernel& kernel, std::string name, DomainId domain)
    : Component(std::move(name)) {
    kernel.add_component(*this, domain);
}

std::uint32_t RegisterFile::read32(std::uint64_t offset) const {
    if (offset % 4 != 0 || offset >= regs::kWindowSize)
        throw BusFault("regfile: unmapped read at offset " + std::to_string(offset));
    if (offset == regs::kTxStart)
        return tx_busy_ ? 1u : 0u;
    return reg_[offset / 4];
}

void RegisterFile::write32(std::uint64_t offset, std::uint32_t value) {
    if (offset % 4 != 0 || offset >= regs::kWindowSize)
        throw BusFault("regfile: unmapped write at offset " + std::to_string(offset));
    staged_writes_.emplace_back(offset, value);
}

void RegisterFile::commit() {
    for (const auto& [offset, value] : staged_writes_)
        apply_write(offset, value);
    staged_writes_.clear();
}

void RegisterFile::apply_write(std::uint64_t offset, std::uint32_t value) {
    switch (offset) {
    case regs::kMacLo:
        reg_[offset / 4] = value;
        break;
    case regs::kMacHi:
        reg_[offset / 4] = value & 0xFFFFu;
        break;
    case regs::kTxSrcLo:
    case regs::kTxSrcHi:
    case regs::kTxLen:
        if (tx_busy_) {
            warnings_++;
            trace("warning", "tx-config write ignored while busy");
            return;
        }
        reg_[offset / 4] = value;
        break;
    case regs::kTxStart:
        if ((value & 1u) == 0)
            return;
        if (tx_busy_) {
            warnings_++;
            trace("warning", "tx start ignored while busy");
            return;
        }
        tx_busy_ = true;
        tx_start_pending_ = true;
        trace("tx_start", reg_[kIdxTxLen]);
        break;
    case regs::kRxDstLo:
    case regs::kRxDstHi:
        reg_[offset / 4] = value;
        break;
    case regs::kRxBufLen:
        reg_[offset / 4] = value;
        reg_[kIdxRxStatus] = 0;  // arming clears the previous status
        rx_arm_pending_ = true;
        trace("rx_arm", value);
        break;
    case regs::kRxStatus:
        // read-only; cleared by re-arming
        break;
    case regs::kIrqEn:
        reg_[offset / 4] = value & 0xFu;
        break;
    case regs::kIrqStatus:
        reg_[offset / 4] &= ~value;  // W1C
        break;
    default:
        break;  // reserved: writes ignored
    }
}

bool RegisterFile::take_tx_start() {
    if (!tx_start_pending_)
        return false;
    tx_start_pending_ = false;
    return true;
}

bool RegisterFile::take_rx_arm() {
    if (!rx_arm_pending_)
        return false;
    rx_arm_pending_ = false;
    return true;
}

void RegisterFile::raise_irq(std::uint32_t bits) {
    reg_[kIdxIrqStatus] |= bits;
}

void RegisterFile::finish_tx(bool error) {
    tx_busy_ = false;
    raise_irq(error ? regs::kIrqTxErr : regs::kIrqTxDone);
}

void RegisterFile::finish_rx(std::size_t rx_len, bool fcs_err, bool overflow) {
    std::uint32_t status = regs::kRxDone;
    if (fcs_err)
        status |= regs::kRxFcsErr;
    if (overflow)
        status |= regs::kRxOverflow;
    status |= static_cast<std::uint32_t>(std::min<std::size_t>(rx_len, 0xFFFF)) << 16;
    reg_[kIdxRxStatus] = status;
    std::uint32_t irq = regs::kIrqRxDone;
    if (fcs_err)
        irq |= regs::kIrqRxFcsErr;
    raise_irq(irq);
}

std::uint64_t RegisterFile::tx_src() const {
    return (static_cast<std::uint64_t>(reg_[regs::kTxSrcHi / 4]) << 32) | reg_[regs::kTxSrcLo / 4];
}

std::uint64_t RegisterFile::rx_dst() const {
    return (static_cast<std::uint64_t>(reg_[regs::kRxDstHi / 4]) << 32) | reg_[regs::kRxDstLo / 4];
}

}  // namespace ethsim
