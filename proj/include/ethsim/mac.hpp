// SPDX-License-Identifier: Apache-2.0
//
// MAC transmit/receive engines over a modeled RGMII wire. The physical
// interface is 4 bits wide at 125 MHz double data rate; the simulator folds
// both nibbles of a cycle into one wire octet per Ethernet-domain edge,
// which preserves every cycle count. nibble_split/nibble_join keep the DDR
// view available for traces.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>

#include "ethsim/frame.hpp"
#include "ethsim/stream.hpp"

namespace ethsim {

// Low nibble travels first on the wire.
constexpr std::pair<std::uint8_t, std::uint8_t> nibble_split(std::uint8_t octet) {
    return {static_cast<std::uint8_t>(octet & 0x0F), static_cast<std::uint8_t>(octet >> 4)};
}
constexpr std::uint8_t nibble_join(std::uint8_t low, std::uint8_t high) {
    return static_cast<std::uint8_t>((high << 4) | (low & 0x0F));
}

// One-octet-per-cycle wire with an idle state. A driver stages at most one
// octet per edge; listeners observe it on the next edge. The line has no
// flow control: it never pauses mid-frame.
class Wire final : public Component {
public:
    Wire(Kernel& kernel, std::string name, DomainId domain);

    void drive(std::uint8_t octet);
    std::optional<std::uint8_t> symbol() const { return committed_; }
    std::uint64_t octet_count() const { return octets_; }

    void tick() override {}
    void commit() override;

private:
    std::optional<std::uint8_t> staged_;
    std::optional<std::uint8_t> committed_;
    std::uint64_t octets_ = 0;
};

enum class TxError { none, underrun };

struct TxFrameStats {
    std::uint64_t frames = 0;
    std::size_t content_len = 0;     // header + payload + pad octets of the last frame
    TxError error = TxError::none;
    SimTime sfd_time{};              // SFD octet on the wire
    SimTime last_payload_time{};     // final payload/pad octet
    SimTime last_fcs_time{};         // final FCS octet
};

struct MacTxConfig {
    // Transmission starts once min(frame_len, threshold) bytes are staged
    // upstream. SIZE_MAX yields store-and-forward.
    std::size_t cut_through_threshold = 16;
};

// Framing engine: preamble(7) + SFD, payload/pad with a running CRC, FCS,
// then a 12-octet inter-packet gap. Emits exactly one wire octet per
// Ethernet edge while a frame is on the line. If the input runs dry
// mid-frame the frame is aborted with a complemented FCS so any receiver
// flags it.
class MacTxEngine final : public Component {
public:
    MacTxEngine(Kernel& kernel, std::string name, DomainId domain, StreamSource& in, Wire& wire,
                std::function<std::size_t()> staged_bytes, MacTxConfig cfg = {});

    // Staged request from the system side; takes effect on the next edge.
    void request_frame(std::size_t frame_len);
    bool frame_done() const { return done_; }
    bool idle() const { return state_ == State::idle && !request_; }
    const TxFrameStats& stats() const { return stats_; }

    void tick() override;
    void commit() override;

private:
    enum class State { idle, preamble, payload, fcs, ipg };

    void begin_fcs(std::uint32_t fcs_value, bool error);

    StreamSource& in_;
    Wire& wire_;
    std::function<std::size_t()> staged_bytes_;
    MacTxConfig cfg_;

    State state_ = State::idle;
    std::optional<std::size_t> request_;         // committed frame length
    std::optional<std::size_t> staged_request_;
    bool done_ = false;
    bool staged_done_ = false;

    Crc32 crc_;
    std::size_t emitted_ = 0;      // octets within the current phase
    std::size_t content_sent_ = 0; // header+payload octets consumed from the stream
    std::size_t frame_len_ = 0;
    std::size_t content_len_ = 0;  // frame_len padded to the 60-octet minimum
    std::uint32_t fcs_shift_ = 0;
    TxFrameStats stats_;
};

struct FrameReport {
    std::uint64_t seq = 0;           // increments per completed frame
    std::size_t length = 0;          // forwarded octets (header + payload + pad)
    bool fcs_ok = false;
    bool overflow = false;           // downstream could not absorb the line rate
    SimTime sfd_time{};
    SimTime last_payload_time{};
    SimTime last_fcs_time{};
};

// Receive engine: hunts for preamble/SFD, forwards frame content (not the
// FCS) downstream with last on the final content octet, and verifies the
// running CRC against the trailing FCS once the wire goes idle.
class MacRxEngine final : public Component {
public:
    MacRxEngine(Kernel& kernel, std::string name, DomainId domain, Wire& wire, StreamSink& out);

    const FrameReport& report() const { return report_; }

    void tick() override;
    void commit() override;

private:
    enum class State { hunt, preamble, frame };

    struct PendingOctet {
        std::uint8_t octet = 0;
        SimTime time{};
    };

    void forward(std::uint8_t octet);
    void end_frame();

    Wire& wire_;
    StreamSink& out_;
    State state_ = State::hunt;
    std::deque<PendingOctet> line_;  // holds the trailing FCS candidates
    Crc32 crc_;
    std::size_t forwarded_ = 0;
    bool overflow_ = false;
    SimTime sfd_time_{};
    FrameReport report_;
    FrameReport staged_report_;
    bool report_staged_ = false;
};

// Test stimulus: drives queued wire frames octet by octet with idle gaps,
// standing in for a link partner.
class FrameInjector final : public Component {
public:
    FrameInjector(Kernel& kernel, std::string name, DomainId domain, Wire& wire,
                  std::size_t gap_octets = kIpgOctets);

    void inject(const WireFrame& frame);
    bool busy() const { return !queue_.empty(); }

    void tick() override;

private:
    Wire& wire_;
    std::size_t gap_octets_;
    std::deque<std::uint8_t> queue_;  // flattened octets with gaps encoded as idles
    std::deque<bool> drive_;          // parallel flags: true = drive octet
};

}  // namespace ethsim
