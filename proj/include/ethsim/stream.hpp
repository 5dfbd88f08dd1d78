// SPDX-License-Identifier: Apache-2.0
//
// Handshaked streaming plumbing: single-slot valid/ready channels, the
// dual-clock FIFO bridging the system and Ethernet domains, and byte-exact
// width converters. A beat moves across a channel only on an edge where the
// producer holds data and the consumer has freed its slot; per hop that
// costs one cycle of latency and sustains one beat per cycle.

#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>

#include "ethsim/sim.hpp"

namespace ethsim {

inline constexpr std::size_t kMaxBeatBytes = 64;

// One AXI-Stream transfer unit. Valid bytes always form a prefix of data[];
// only a last beat may carry fewer than width bytes.
struct StreamBeat {
    std::array<std::uint8_t, kMaxBeatBytes> data{};
    std::uint64_t keep = 0;
    std::uint8_t width = 1;
    bool last = false;

    std::size_t byte_count() const { return static_cast<std::size_t>(std::popcount(keep)); }
    bool well_formed() const;

    static StreamBeat make(std::span<const std::uint8_t> bytes, std::uint8_t width, bool last);
    friend bool operator==(const StreamBeat&, const StreamBeat&) = default;
};

struct StreamSink {
    virtual ~StreamSink() = default;
    virtual bool can_push() const = 0;
    virtual void push(const StreamBeat& beat) = 0;
};

struct StreamSource {
    virtual ~StreamSource() = default;
    virtual const StreamBeat* front() const = 0;
    virtual void pop() = 0;
};

struct ChannelCounters {
    std::uint64_t transferred = 0;
    std::uint64_t stalled_valid = 0;
    std::uint64_t stalled_ready = 0;
    std::uint64_t idle = 0;
};

// Point-to-point channel within one clock domain. The producer pushes during
// its tick; the handshake is evaluated in the channel's commit, so the beat
// becomes visible to the consumer on the following edge.
class StreamChannel final : public Component, public StreamSink, public StreamSource {
public:
    StreamChannel(Kernel& kernel, std::string name, DomainId domain, std::uint8_t width);

    bool can_push() const override { return !offered_.has_value(); }
    void push(const StreamBeat& beat) override;

    const StreamBeat* front() const override { return delivered_ ? &*delivered_ : nullptr; }
    void pop() override;

    std::uint8_t width() const { return width_; }
    std::size_t buffered_bytes() const;
    const ChannelCounters& counters() const { return counters_; }

    // Reset line: drops any pending beat. Used for error recovery only.
    void flush();

    void tick() override {}
    void commit() override;

private:
    std::uint8_t width_;
    std::optional<StreamBeat> offered_;    // producer pending, stable until transferred
    std::optional<StreamBeat> delivered_;  // visible to the consumer
    bool popped_ = false;
    ChannelCounters counters_;
};

struct CdcFifoConfig {
    std::size_t depth = 32;        // entries, power of two
    unsigned sync_stages = 2;      // pointer synchronizer depth, >= 2
};

// Dual-clock FIFO. Writes land on write-domain edges, reads on read-domain
// edges; an entry becomes visible to the reader only after its write count
// has passed through sync_stages read-domain samples, and the full flag is
// conservative the same way (gray-pointer behavior).
class CdcFifo : public StreamSink, public StreamSource {
public:
    CdcFifo(Kernel& kernel, std::string name, DomainId write_domain, DomainId read_domain,
            std::uint8_t width, CdcFifoConfig cfg = {});

    Component& write_port() { return write_port_; }
    Component& read_port() { return read_port_; }

    // Write side; legal only during write-domain edges.
    bool can_push() const override;
    void push(const StreamBeat& beat) override;

    // Read side; legal only during read-domain edges.
    const StreamBeat* front() const override;
    void pop() override;

    std::uint8_t width() const { return width_; }
    std::size_t depth() const { return depth_; }
    std::size_t occupancy() const;             // writes - reads, bounded by depth
    std::size_t max_occupancy() const { return max_occupancy_; }
    std::size_t visible_bytes() const { return visible_bytes_; }

    // Reset line: empties the FIFO and its synchronizers.
    void flush();

private:
    class Port final : public Component {
    public:
        Port(std::string name, CdcFifo& fifo, bool is_write) : Component(std::move(name)), fifo_(fifo), is_write_(is_write) {}
        void tick() override {}
        void commit() override { is_write_ ? fifo_.commit_write() : fifo_.commit_read(); }

    private:
        CdcFifo& fifo_;
        bool is_write_;
    };

    void commit_write();
    void commit_read();
    void trace_occupancy();
    void require_domain(DomainId expected, const char* what) const;

    Kernel& kernel_;
    std::string name_;
    DomainId write_domain_;
    DomainId read_domain_;
    std::uint8_t width_;
    std::size_t depth_;
    unsigned sync_stages_;
    Port write_port_;
    Port read_port_;

    std::vector<StreamBeat> ring_;
    std::uint64_t wr_count_ = 0;           // committed writes
    std::uint64_t rd_count_ = 0;           // committed reads
    std::uint64_t wr_visible_ = 0;         // write count as seen by the reader
    std::uint64_t rd_visible_ = 0;         // read count as seen by the writer
    std::deque<std::uint64_t> wr_sync_;    // write-count samples in flight to the reader
    std::deque<std::uint64_t> rd_sync_;    // read-count samples in flight to the writer
    std::size_t visible_bytes_ = 0;
    std::size_t max_occupancy_ = 0;
    std::optional<StreamBeat> staged_push_;
    bool staged_pop_ = false;
};

// Splits wide beats into narrow ones; in_width must be a multiple of
// out_width. One output beat per edge when unstalled.
class DownSizer final : public Component {
public:
    DownSizer(Kernel& kernel, std::string name, DomainId domain, StreamSource& in, StreamSink& out,
              std::uint8_t in_width, std::uint8_t out_width);

    void tick() override;
    std::size_t buffered_bytes() const { return have_ ? held_.byte_count() - consumed_ : 0; }
    void flush() { have_ = false; consumed_ = 0; }

private:
    StreamSource& in_;
    StreamSink& out_;
    std::uint8_t in_width_;
    std::uint8_t out_width_;
    StreamBeat held_;
    std::size_t consumed_ = 0;
    bool have_ = false;
};

// Packs narrow beats into wide ones, flushing early on last. Byte order is
// identical to DownSizer so the pair composes to the identity.
class UpSizer final : public Component {
public:
    UpSizer(Kernel& kernel, std::string name, DomainId domain, StreamSource& in, StreamSink& out,
            std::uint8_t in_width, std::uint8_t out_width);

    void tick() override;
    std::size_t buffered_bytes() const { return pending_ ? pending_->byte_count() : filled_; }
    void flush() { pending_.reset(); filled_ = 0; }

private:
    StreamSource& in_;
    StreamSink& out_;
    std::uint8_t in_width_;
    std::uint8_t out_width_;
    StreamBeat packing_{};
    std::size_t filled_ = 0;
    std::optional<StreamBeat> pending_;
};

}  // namespace ethsim
