// SPDX-License-Identifier: Apache-2.0

#include "ethsim/controller.hpp"

#include <algorithm>
#include <cstring>

namespace ethsim {

double savings_percent(const PhaseLatencies& buffered, const PhaseLatencies& bufferless) {
    if (buffered.total_cycles == 0)
        throw ConfigError("savings: buffered total of zero cycles");
    return 100.0 *
           (static_cast<double>(buffered.total_cycles) - static_cast<double>(bufferless.total_cycles)) /
           static_cast<double>(buffered.total_cycles);
}

PhaseLatencies phases_from_boundaries(SimTime start, SimTime config_end, SimTime sfd,
                                      SimTime last_payload, SimTime crc_end,
                                      std::uint64_t sys_period_ps) {
    const auto cycles = [&](SimTime t) -> std::uint64_t {
        if (t.ps < start.ps)
            throw SimError("phase boundary precedes transaction start");
        return (t.ps - start.ps + sys_period_ps - 1) / sys_period_ps;
    };
    const std::uint64_t c1 = cycles(config_end);
    const std::uint64_t c2 = std::max(c1, cycles(sfd));
    const std::uint64_t c3 = std::max(c2, cycles(last_payload));
    const std::uint64_t c4 = std::max(c3, cycles(crc_end));
    return PhaseLatencies{c1, c2 - c1, c3 - c2, c4 - c3, c4};
}

std::vector<std::uint8_t> TxParams::content() const {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(kHeaderLen + payload.size());
    bytes.insert(bytes.end(), dst.octets.begin(), dst.octets.end());
    bytes.insert(bytes.end(), src.octets.begin(), src.octets.end());
    bytes.push_back(static_cast<std::uint8_t>(ethertype >> 8));
    bytes.push_back(static_cast<std::uint8_t>(ethertype & 0xFF));
    bytes.insert(bytes.end(), payload.begin(), payload.end());
    return bytes;
}

// ---------------------------------------------------------------------------
// ScriptedHost

ScriptedHost::ScriptedHost(Kernel& kernel, std::string name, DomainId domain, RegisterFile& regfile)
    : Component(std::move(name)), regfile_(regfile) {
    kernel.add_component(*this, domain);
}

void ScriptedHost::set_copy_out(CopyOutFn len_fn, WordReader reader, MemoryModel* mem,
                                std::uint32_t word_bytes) {
    copy_out_len_ = std::move(len_fn);
    window_reader_ = std::move(reader);
    copy_out_mem_ = mem;
    word_bytes_ = word_bytes;
}

void ScriptedHost::run(std::vector<Action> script) {
    if (!done())
        throw SimError("host '" + name() + "': script installed while one is running");
    for (auto& a : script)
        script_.push_back(std::move(a));
}

void ScriptedHost::complete_action() {
    last_completion_time_ = now();
    if (active_->trigger)
        trigger_time_ = now();
    active_.reset();
}

void ScriptedHost::tick() {
    if (!active_) {
        if (script_.empty())
            return;
        active_ = std::move(script_.front());
        script_.pop_front();
        countdown_ = active_->cycles;
        word_index_ = 0;
        switch (active_->kind) {
        case Action::Kind::copy_to_window:
            word_total_ = (active_->bytes.size() + word_bytes_ - 1) / word_bytes_;
            break;
        case Action::Kind::copy_from_window:
            copy_out_bytes_ = copy_out_len_();
            word_total_ = (copy_out_bytes_ + word_bytes_ - 1) / word_bytes_;
            break;
        default:
            word_total_ = 0;
            break;
        }
        if ((active_->kind == Action::Kind::copy_to_window ||
             active_->kind == Action::Kind::copy_from_window) &&
            word_total_ == 0) {
            complete_action();
            return;
        }
    }

    switch (active_->kind) {
    case Action::Kind::reg_write:
        if (--countdown_ == 0) {
            regfile_.write32(active_->offset, active_->value);
            complete_action();
        }
        break;
    case Action::Kind::wait_bit:
        if (regfile_.read32(active_->offset) & active_->value)
            complete_action();
        break;
    case Action::Kind::copy_to_window:
        copy_cycles_++;
        if (--countdown_ == 0) {
            const std::size_t begin = word_index_ * word_bytes_;
            const std::size_t n = std::min<std::size_t>(word_bytes_, active_->bytes.size() - begin);
            window_writer_(word_index_, {active_->bytes.data() + begin, n});
            word_index_++;
            if (word_index_ == word_total_)
                complete_action();
            else
                countdown_ = active_->cycles;
        }
        break;
    case Action::Kind::copy_from_window:
        copy_cycles_++;
        if (--countdown_ == 0) {
            const std::size_t begin = word_index_ * word_bytes_;
            const std::size_t n = std::min<std::size_t>(word_bytes_, copy_out_bytes_ - begin);
            std::array<std::uint8_t, kMaxBeatBytes> word{};
            window_reader_(word_index_, {word.data(), n});
            copy_out_mem_->write(copy_out_dst_ + begin, {word.data(), n});
            word_index_++;
            if (word_index_ == word_total_)
                complete_action();
            else
                countdown_ = active_->cycles;
        }
        break;
    }
}

// ---------------------------------------------------------------------------
// BufferlessController

BufferlessController::BufferlessController(Kernel& kernel, DomainId sys_domain, DomainId eth_domain,
                                           ControllerConfig cfg, Wire* shared_rx_wire)
    : kernel_(kernel),
      cfg_(cfg),
      sys_period_ps_(kernel.domain_period_ps(sys_domain)),
      memory_(cfg.memory_bytes, cfg.mem_read_latency, cfg.mem_write_latency),
      regfile_(kernel, "regs", sys_domain),
      host_(kernel, "host", sys_domain, regfile_),
      tx_wire_(kernel, "tx_wire", eth_domain),
      own_rx_wire_(shared_rx_wire ? std::optional<Wire>{}
                                  : std::optional<Wire>{std::in_place, kernel, "rx_wire", eth_domain}),
      rx_wire_(shared_rx_wire ? shared_rx_wire : &*own_rx_wire_),
      tx_fifo_(kernel, "tx_fifo", sys_domain, eth_domain, static_cast<std::uint8_t>(cfg.bus_width_bytes),
               {cfg.cdc_depth, cfg.sync_stages}),
      tx_byte_chan_(kernel, "tx_bytes", eth_domain, 1),
      down_(kernel, "tx_sizer", eth_domain, tx_fifo_, tx_byte_chan_,
            static_cast<std::uint8_t>(cfg.bus_width_bytes), 1),
      mac_tx_(kernel, "mac_tx", eth_domain, tx_byte_chan_, tx_wire_,
              [this] {
                  return tx_fifo_.visible_bytes() + down_.buffered_bytes() +
                         tx_byte_chan_.buffered_bytes();
              },
              MacTxConfig{cfg.cut_through_threshold}),
      rx_byte_chan_(kernel, "rx_bytes", eth_domain, 1),
      rx_fifo_(kernel, "rx_fifo", eth_domain, sys_domain, static_cast<std::uint8_t>(cfg.bus_width_bytes),
               {cfg.cdc_depth, cfg.sync_stages}),
      mac_rx_(kernel, "mac_rx", eth_domain, *rx_wire_, rx_byte_chan_),
      up_(kernel, "rx_sizer", eth_domain, rx_byte_chan_, rx_fifo_, 1,
          static_cast<std::uint8_t>(cfg.bus_width_bytes)),
      dma_(kernel, "dma", sys_domain, memory_, &tx_fifo_, &rx_fifo_,
           DmaConfig{cfg.bus_width_bytes, kDefaultMaxBurstBeats, cfg.dma_setup_cycles}),
      seq_(kernel, "seq", sys_domain, *this) {
    if (kernel.domain_period_ps(eth_domain) != kEthPeriodPs)
        throw ConfigError("controller: Ethernet domain must run at 125 MHz");
}

BufferlessController::Sequencer::Sequencer(Kernel& kernel, std::string name, DomainId domain,
                                           BufferlessController& c)
    : Component(std::move(name)), c_(c) {
    kernel.add_component(*this, domain);
}

void BufferlessController::Sequencer::finalize_rx(std::size_t bytes, bool fcs_err, bool overflow) {
    c_.regfile_.finish_rx(bytes, fcs_err, overflow);
    rx_bytes = bytes;
    rx_end_time = now();
    rx_overflowed = overflow;
    rx_in_flight = false;
    rx_completed++;
}

void BufferlessController::Sequencer::tick() {
    auto& c = c_;
    if (c.regfile_.take_tx_start()) {
        c.dma_.submit({next_id_++, DmaDirection::mem_to_stream, c.regfile_.tx_src(),
                       c.regfile_.tx_len()});
        c.mac_tx_.request_frame(c.regfile_.tx_len());
        tx_in_flight = true;
    }
    if (tx_in_flight && c.mac_tx_.frame_done()) {
        const bool err = c.mac_tx_.stats().error != TxError::none;
        if (err) {
            // Abort recovery: drop whatever the aborted frame left behind.
            if (c.dma_.busy())
                c.dma_.cancel();
            c.tx_fifo_.flush();
            c.down_.flush();
            c.tx_byte_chan_.flush();
        }
        c.regfile_.finish_tx(err);
        tx_in_flight = false;
        tx_completed++;
    }
    if (c.regfile_.take_rx_arm()) {
        rx_req_id_ = next_id_++;
        c.dma_.submit({rx_req_id_, DmaDirection::stream_to_mem, c.regfile_.rx_dst(),
                       c.regfile_.rx_buf_len()});
        rx_base_seq = c.mac_rx_.report().seq;
        rx_in_flight = true;
        rx_overflowed = false;
    }
    if (rx_in_flight) {
        const DmaStatus& st = c.dma_.status();
        const FrameReport& rep = c.mac_rx_.report();
        // Only this request's completion counts; a stale status from the
        // previous transfer must not finalize the new one.
        const bool ours = st.id == rx_req_id_;
        const bool have_report = rep.seq > rx_base_seq;
        if (ours && st.state == DmaState::done) {
            finalize_rx(st.bytes_moved, have_report && !rep.fcs_ok, false);
        } else if (ours && st.state == DmaState::error && st.error == DmaError::rx_overflow) {
            finalize_rx(st.bytes_moved, have_report && !rep.fcs_ok, true);
        } else if (have_report && rep.overflow) {
            c.dma_.cancel();
            c.rx_fifo_.flush();
            c.up_.flush();
            c.rx_byte_chan_.flush();
            finalize_rx(rep.length, !rep.fcs_ok, true);
        }
    }
}

TxFailure BufferlessController::begin_tx(const TxParams& params) {
    if (!tx_done())
        throw SimError("controller: transmit transaction already in flight");
    const std::vector<std::uint8_t> content = params.content();
    memory_.write(cfg_.tx_src_addr, content);

    tx_begin_ = kernel_.now();
    tx_wire_base_ = tx_wire_.octet_count();
    tx_expected_ = seq_.tx_completed + 1;

    using Action = ScriptedHost::Action;
    std::vector<Action> script;
    script.push_back({Action::Kind::reg_write, regs::kTxSrcLo,
                      static_cast<std::uint32_t>(cfg_.tx_src_addr & 0xFFFFFFFF), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kTxSrcHi,
                      static_cast<std::uint32_t>(cfg_.tx_src_addr >> 32), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kTxLen,
                      static_cast<std::uint32_t>(content.size()), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kTxStart, 1, 1, {}, true});
    host_.run(std::move(script));
    return TxFailure::none;
}

bool BufferlessController::tx_done() const {
    return host_.done() && seq_.tx_completed >= tx_expected_;
}

TxResult BufferlessController::tx_result() const {
    TxResult r;
    const TxFrameStats& st = mac_tx_.stats();
    r.wire_octets = tx_wire_.octet_count() - tx_wire_base_;
    if (st.error == TxError::underrun) {
        r.failure = TxFailure::underrun;
        return r;
    }
    r.phases = phases_from_boundaries(tx_begin_, host_.trigger_time(), st.sfd_time,
                                      st.last_payload_time, st.last_fcs_time, sys_period_ps_);
    return r;
}

void BufferlessController::begin_rx(std::uint32_t capacity_bytes) {
    if (!rx_done())
        throw SimError("controller: receive transaction already in flight");
    rx_begin_ = kernel_.now();
    rx_expected_ = seq_.rx_completed + 1;

    using Action = ScriptedHost::Action;
    std::vector<Action> script;
    script.push_back({Action::Kind::reg_write, regs::kRxDstLo,
                      static_cast<std::uint32_t>(cfg_.rx_dst_addr & 0xFFFFFFFF), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kRxDstHi,
                      static_cast<std::uint32_t>(cfg_.rx_dst_addr >> 32), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kRxBufLen, capacity_bytes, 1, {}, true});
    host_.run(std::move(script));
}

bool BufferlessController::rx_armed() const {
    return seq_.rx_in_flight;
}

bool BufferlessController::rx_done() const {
    return host_.done() && seq_.rx_completed >= rx_expected_;
}

RxResult BufferlessController::rx_result() const {
    RxResult r;
    const FrameReport& rep = mac_rx_.report();
    r.failure = seq_.rx_overflowed ? RxFailure::overflow : RxFailure::none;
    r.fcs_ok = (regfile_.rx_status() & regs::kRxFcsErr) == 0;
    r.bytes = seq_.rx_bytes;
    r.phases = phases_from_boundaries(rx_begin_, host_.trigger_time(), rep.sfd_time,
                                      rep.last_payload_time, seq_.rx_end_time, sys_period_ps_);
    return r;
}

// ---------------------------------------------------------------------------
// BufferedBaseline

BufferedBaseline::TxBuffer::TxBuffer(Kernel& kernel, std::string name, DomainId eth_domain)
    : Component(std::move(name)) {
    kernel.add_component(*this, eth_domain);
}

void BufferedBaseline::TxBuffer::write_word(std::size_t word_index,
                                            std::span<const std::uint8_t> bytes,
                                            std::uint32_t word_bytes) {
    const std::size_t offset = word_index * word_bytes;
    if (offset + bytes.size() > bytes_.size())
        throw BusFault("tx buffer: write beyond 1536-byte window");
    std::memcpy(bytes_.data() + offset, bytes.data(), bytes.size());
    bytes_written_ = std::max(bytes_written_, offset + bytes.size());
}

void BufferedBaseline::TxBuffer::arm(std::size_t len) {
    staged_arm_ = len;
}

void BufferedBaseline::TxBuffer::commit() {
    if (staged_arm_) {
        len_ = *staged_arm_;
        cursor_ = 0;
        armed_ = true;
        staged_arm_.reset();
    }
}

const StreamBeat* BufferedBaseline::TxBuffer::front() const {
    if (!armed_ || cursor_ >= len_ || cursor_ >= bytes_written_)
        return nullptr;
    scratch_ = StreamBeat::make({bytes_.data() + cursor_, 1}, 1, cursor_ + 1 == len_);
    return &scratch_;
}

void BufferedBaseline::TxBuffer::pop() {
    if (!armed_ || cursor_ >= len_)
        throw ProtocolViolation("tx buffer: pop with no byte available");
    cursor_++;
}

BufferedBaseline::RxBuffer::RxBuffer(Kernel& kernel, std::string name, DomainId eth_domain)
    : Component(std::move(name)) {
    kernel.add_component(*this, eth_domain);
}

void BufferedBaseline::RxBuffer::push(const StreamBeat& beat) {
    if (!can_push())
        throw ProtocolViolation("rx buffer: push while full");
    bytes_[fill_++] = beat.data[0];
}

void BufferedBaseline::RxBuffer::read_bytes(std::size_t byte_offset, std::span<std::uint8_t> out) const {
    if (byte_offset + out.size() > bytes_.size())
        throw BusFault("rx buffer: read beyond 1536-byte window");
    std::memcpy(out.data(), bytes_.data() + byte_offset, out.size());
}

BufferedBaseline::BufferedBaseline(Kernel& kernel, DomainId sys_domain, DomainId eth_domain,
                                   ControllerConfig cfg, Wire* shared_rx_wire)
    : kernel_(kernel),
      cfg_(cfg),
      sys_period_ps_(kernel.domain_period_ps(sys_domain)),
      memory_(cfg.memory_bytes, cfg.mem_read_latency, cfg.mem_write_latency),
      regfile_(kernel, "regs", sys_domain),
      host_(kernel, "host", sys_domain, regfile_),
      tx_wire_(kernel, "tx_wire", eth_domain),
      own_rx_wire_(shared_rx_wire ? std::optional<Wire>{}
                                  : std::optional<Wire>{std::in_place, kernel, "rx_wire", eth_domain}),
      rx_wire_(shared_rx_wire ? shared_rx_wire : &*own_rx_wire_),
      tx_buf_(kernel, "tx_buf", eth_domain),
      rx_buf_(kernel, "rx_buf", eth_domain),
      mac_tx_(kernel, "mac_tx", eth_domain, tx_buf_, tx_wire_,
              [this] { return tx_buf_.bytes_written(); },
              MacTxConfig{std::numeric_limits<std::size_t>::max()}),  // store-and-forward
      mac_rx_(kernel, "mac_rx", eth_domain, *rx_wire_, rx_buf_),
      seq_(kernel, "seq", sys_domain, *this) {
    if (kernel.domain_period_ps(eth_domain) != kEthPeriodPs)
        throw ConfigError("controller: Ethernet domain must run at 125 MHz");
    host_.set_window_writer([this](std::size_t word, std::span<const std::uint8_t> bytes) {
        tx_buf_.write_word(word, bytes, cfg_.bus_width_bytes);
    });
    host_.set_copy_out(
        [this]() -> std::size_t {
            return std::min<std::size_t>(regfile_.rx_status() >> 16, regs::kFrameBufBytes);
        },
        [this](std::size_t word, std::span<std::uint8_t> out) {
            rx_buf_.read_bytes(word * cfg_.bus_width_bytes, out);
        },
        &memory_, cfg.bus_width_bytes);
}

BufferedBaseline::Sequencer::Sequencer(Kernel& kernel, std::string name, DomainId domain,
                                       BufferedBaseline& c)
    : Component(std::move(name)), c_(c) {
    kernel.add_component(*this, domain);
}

void BufferedBaseline::Sequencer::tick() {
    auto& c = c_;
    if (c.regfile_.take_tx_start()) {
        c.tx_buf_.arm(c.regfile_.tx_len());
        c.mac_tx_.request_frame(c.regfile_.tx_len());
        tx_in_flight = true;
    }
    if (tx_in_flight && c.mac_tx_.frame_done()) {
        c.regfile_.finish_tx(c.mac_tx_.stats().error != TxError::none);
        tx_in_flight = false;
        tx_completed++;
    }
    if (c.regfile_.take_rx_arm()) {
        c.rx_buf_.clear();
        rx_base_seq = c.mac_rx_.report().seq;
        rx_in_flight = true;
        rx_overflowed = false;
    }
    if (rx_in_flight) {
        const FrameReport& rep = c.mac_rx_.report();
        if (rep.seq > rx_base_seq) {
            const bool overflow = rep.overflow || rep.length > c.regfile_.rx_buf_len();
            rx_overflowed = overflow;
            rx_bytes = rep.length;
            c.regfile_.finish_rx(rep.length, !rep.fcs_ok, overflow);
            rx_in_flight = false;
            rx_completed++;
        }
    }
}

TxFailure BufferedBaseline::begin_tx(const TxParams& params) {
    if (!tx_done())
        throw SimError("controller: transmit transaction already in flight");
    const std::vector<std::uint8_t> content = params.content();
    // Store-and-forward: the whole frame, padded and with its FCS, must fit
    // in the 1536-byte buffer or the transaction never starts.
    const std::size_t wire_content =
        kHeaderLen + std::max(params.payload.size(), kMinPayloadLen) + kFcsLen;
    if (wire_content > regs::kFrameBufBytes)
        return TxFailure::buffer_overflow;

    tx_begin_ = kernel_.now();
    tx_wire_base_ = tx_wire_.octet_count();
    tx_copy_base_ = host_.copy_cycles();
    tx_expected_ = seq_.tx_completed + 1;

    using Action = ScriptedHost::Action;
    std::vector<Action> script;
    script.push_back({Action::Kind::copy_to_window, 0, 0, 1 + cfg_.cpu_copy_overhead, content, false});
    script.push_back({Action::Kind::reg_write, regs::kTxLen,
                      static_cast<std::uint32_t>(content.size()), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kTxStart, 1, 1, {}, true});
    host_.run(std::move(script));
    return TxFailure::none;
}

bool BufferedBaseline::tx_done() const {
    return host_.done() && seq_.tx_completed >= tx_expected_;
}

TxResult BufferedBaseline::tx_result() const {
    TxResult r;
    const TxFrameStats& st = mac_tx_.stats();
    r.wire_octets = tx_wire_.octet_count() - tx_wire_base_;
    r.copy_cycles = host_.copy_cycles() - tx_copy_base_;
    if (st.error == TxError::underrun) {
        r.failure = TxFailure::underrun;
        return r;
    }
    r.phases = phases_from_boundaries(tx_begin_, host_.trigger_time(), st.sfd_time,
                                      st.last_payload_time, st.last_fcs_time, sys_period_ps_);
    return r;
}

void BufferedBaseline::begin_rx(std::uint32_t capacity_bytes) {
    if (!rx_done())
        throw SimError("controller: receive transaction already in flight");
    rx_begin_ = kernel_.now();
    rx_copy_base_ = host_.copy_cycles();
    rx_expected_ = seq_.rx_completed + 1;
    host_.set_copy_out_dst(cfg_.rx_dst_addr);

    using Action = ScriptedHost::Action;
    std::vector<Action> script;
    script.push_back({Action::Kind::reg_write, regs::kRxDstLo,
                      static_cast<std::uint32_t>(cfg_.rx_dst_addr & 0xFFFFFFFF), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kRxDstHi,
                      static_cast<std::uint32_t>(cfg_.rx_dst_addr >> 32), 1, {}, false});
    script.push_back({Action::Kind::reg_write, regs::kRxBufLen, capacity_bytes, 1, {}, true});
    script.push_back({Action::Kind::wait_bit, regs::kRxStatus, regs::kRxDone, 1, {}, false});
    script.push_back({Action::Kind::copy_from_window, 0, 0, 1 + cfg_.cpu_copy_overhead, {}, false});
    host_.run(std::move(script));
}

bool BufferedBaseline::rx_armed() const {
    return seq_.rx_in_flight;
}

bool BufferedBaseline::rx_done() const {
    return host_.done() && seq_.rx_completed >= rx_expected_;
}

RxResult BufferedBaseline::rx_result() const {
    RxResult r;
    const FrameReport& rep = mac_rx_.report();
    r.failure = seq_.rx_overflowed ? RxFailure::overflow : RxFailure::none;
    r.fcs_ok = (regfile_.rx_status() & regs::kRxFcsErr) == 0;
    r.bytes = seq_.rx_bytes;
    r.copy_cycles = host_.copy_cycles() - rx_copy_base_;
    // The transaction ends when the CPU has copied the frame out of the
    // buffer, so the drain is part of the final phase.
    r.phases = phases_from_boundaries(rx_begin_, host_.trigger_time(), rep.sfd_time,
                                      rep.last_payload_time, host_.last_completion_time(),
                                      sys_period_ps_);
    return r;
}

// ---------------------------------------------------------------------------

TxResult run_tx_transaction(Kernel& kernel, Controller& controller, const TxParams& params,
                            SimTime max_time) {
    const TxFailure f = controller.begin_tx(params);
    if (f != TxFailure::none) {
        TxResult r;
        r.failure = f;
        return r;
    }
    if (kernel.run_until([&] { return controller.tx_done(); }, max_time) == RunOutcome::timed_out) {
        TxResult r;
        r.failure = TxFailure::timeout;
        return r;
    }
    return controller.tx_result();
}

RxResult run_rx_transaction(Kernel& kernel, Controller& controller, FrameInjector& injector,
                            const WireFrame& frame, std::uint32_t capacity_bytes, SimTime max_time) {
    controller.begin_rx(capacity_bytes);
    if (kernel.run_until([&] { return controller.rx_armed(); }, max_time) == RunOutcome::timed_out) {
        RxResult r;
        r.failure = RxFailure::timeout;
        return r;
    }
    injector.inject(frame);
    if (kernel.run_until([&] { return controller.rx_done(); }, max_time) == RunOutcome::timed_out) {
        RxResult r;
        r.failure = RxFailure::timeout;
        return r;
    }
    return controller.rx_result();
}

}  // namespace ethsim
