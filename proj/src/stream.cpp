// SPDX-License-Identifier: Apache-2.0

#include "ethsim/stream.hpp"

#include <algorithm>
#include <cstring>

namespace ethsim {
namespace {

bool width_ok(std::uint8_t w) {
    return w >= 1 && w <= kMaxBeatBytes && std::has_single_bit(static_cast<unsigned>(w));
}

}  // namespace

bool StreamBeat::well_formed() const {
    if (!width_ok(width))
        return false;
    const std::size_t n = byte_count();
    if (n == 0 || n > width)
        return false;
    if (keep != ((n == 64) ? ~0ull : ((1ull << n) - 1)))
        return false;  // keep must be a contiguous prefix
    return last || n == width;
}

StreamBeat StreamBeat::make(std::span<const std::uint8_t> bytes, std::uint8_t width, bool last) {
    StreamBeat beat;
    beat.width = width;
    beat.last = last;
    beat.keep = (bytes.size() == 64) ? ~0ull : ((1ull << bytes.size()) - 1);
    std::copy(bytes.begin(), bytes.end(), beat.data.begin());
    if (!beat.well_formed())
        throw ProtocolViolation("stream: malformed beat (" + std::to_string(bytes.size()) +
                                " bytes at width " + std::to_string(width) + ")");
    return beat;
}

StreamChannel::StreamChannel(Kernel& kernel, std::string name, DomainId domain, std::uint8_t width)
    : Component(std::move(name)), width_(width) {
    if (!width_ok(width))
        throw ConfigError("channel: width must be a power of two in [1, 64]");
    kernel.add_component(*this, domain);
}

void StreamChannel::push(const StreamBeat& beat) {
    if (offered_)
        throw ProtocolViolation("channel '" + name() + "': producer modified a pending beat");
    if (beat.width != width_ || !beat.well_formed())
        throw ProtocolViolation("channel '" + name() + "': malformed beat");
    offered_ = beat;
}

void StreamChannel::pop() {
    if (!delivered_)
        throw ProtocolViolation("channel '" + name() + "': pop on empty channel");
    if (popped_)
        throw ProtocolViolation("channel '" + name() + "': double pop in one edge");
    popped_ = true;
}

std::size_t StreamChannel::buffered_bytes() const {
    std::size_t n = 0;
    if (offered_)
        n += offered_->byte_count();
    if (delivered_ && !popped_)
        n += delivered_->byte_count();
    return n;
}

void StreamChannel::flush() {
    offered_.reset();
    delivered_.reset();
    popped_ = false;
}

void StreamChannel::commit() {
    if (popped_) {
        delivered_.reset();
        popped_ = false;
    }
    const bool valid = offered_.has_value();
    const bool ready = !delivered_.has_value();
    if (valid && ready) {
        delivered_ = std::move(offered_);
        offered_.reset();
        counters_.transferred++;
        trace("transfer", delivered_->byte_count());
    } else if (valid) {
        counters_.stalled_ready++;
    } else if (ready) {
        counters_.stalled_valid++;
    } else {
        counters_.idle++;
    }
}

CdcFifo::CdcFifo(Kernel& kernel, std::string name, DomainId write_domain, DomainId read_domain,
                 std::uint8_t width, CdcFifoConfig cfg)
    : kernel_(kernel),
      name_(std::move(name)),
      write_domain_(write_domain),
      read_domain_(read_domain),
      width_(width),
      depth_(cfg.depth),
      sync_stages_(cfg.sync_stages),
      write_port_(name_ + ".wr", *this, true),
      read_port_(name_ + ".rd", *this, false),
      ring_(cfg.depth) {
    if (!width_ok(width))
        throw ConfigError("cdc fifo: width must be a power of two in [1, 64]");
    if (depth_ < 2 || !std::has_single_bit(depth_))
        throw ConfigError("cdc fifo: depth must be a power of two >= 2");
    if (sync_stages_ < 2)
        throw ConfigError("cdc fifo: sync_stages must be >= 2");
    wr_sync_.assign(sync_stages_, 0);
    rd_sync_.assign(sync_stages_, 0);
    kernel.add_component(write_port_, write_domain);
    kernel.add_component(read_port_, read_domain);
}

void CdcFifo::require_domain(DomainId expected, const char* what) const {
    if (!kernel_.in_edge() || kernel_.current_domain() != expected)
        throw ProtocolViolation("fifo '" + name_ + "': " + what + " outside its clock domain");
}

bool CdcFifo::can_push() const {
    return !staged_push_ && (wr_count_ - rd_visible_) < depth_;
}

void CdcFifo::push(const StreamBeat& beat) {
    require_domain(write_domain_, "push");
    if (!can_push())
        throw ProtocolViolation("fifo '" + name_ + "': push while full");
    if (beat.width != width_ || !beat.well_formed())
        throw ProtocolViolation("fifo '" + name_ + "': malformed beat");
    staged_push_ = beat;
}

const StreamBeat* CdcFifo::front() const {
    if (wr_visible_ == rd_count_)
        return nullptr;
    return &ring_[rd_count_ % depth_];
}

void CdcFifo::pop() {
    require_domain(read_domain_, "pop");
    if (staged_pop_)
        throw ProtocolViolation("fifo '" + name_ + "': double pop in one edge");
    if (!front())
        throw ProtocolViolation("fifo '" + name_ + "': pop while empty");
    staged_pop_ = true;
}

std::size_t CdcFifo::occupancy() const {
    const std::uint64_t occ = wr_count_ - rd_count_;
    if (occ > depth_)
        throw ProtocolViolation("fifo '" + name_ + "': occupancy above depth");
    return static_cast<std::size_t>(occ);
}

void CdcFifo::flush() {
    wr_count_ = rd_count_ = wr_visible_ = rd_visible_ = 0;
    wr_sync_.assign(sync_stages_, 0);
    rd_sync_.assign(sync_stages_, 0);
    visible_bytes_ = 0;
    staged_push_.reset();
    staged_pop_ = false;
}

void CdcFifo::commit_write() {
    if (staged_push_) {
        if (wr_count_ - rd_count_ >= depth_)
            throw ProtocolViolation("fifo '" + name_ + "': ring overflow");
        ring_[wr_count_ % depth_] = *staged_push_;
        wr_count_++;
        max_occupancy_ = std::max(max_occupancy_, occupancy());
        staged_push_.reset();
        trace_occupancy();
    }
    // Read-pointer sample marches one synchronizer stage per write edge.
    rd_visible_ = rd_sync_.front();
    rd_sync_.pop_front();
    rd_sync_.push_back(rd_count_);
}

void CdcFifo::commit_read() {
    if (staged_pop_) {
        visible_bytes_ -= ring_[rd_count_ % depth_].byte_count();
        rd_count_++;
        staged_pop_ = false;
        trace_occupancy();
    }
    wr_sync_.push_back(wr_count_);
    const std::uint64_t newly_visible = wr_sync_.front();
    wr_sync_.pop_front();
    for (std::uint64_t i = wr_visible_; i < newly_visible; ++i)
        visible_bytes_ += ring_[i % depth_].byte_count();
    wr_visible_ = newly_visible;
}

void CdcFifo::trace_occupancy() {
    if (kernel_.tracing())
        kernel_.emit_trace(write_port_, "occupancy", std::to_string(occupancy()));
}

DownSizer::DownSizer(Kernel& kernel, std::string name, DomainId domain, StreamSource& in,
                     StreamSink& out, std::uint8_t in_width, std::uint8_t out_width)
    : Component(std::move(name)), in_(in), out_(out), in_width_(in_width), out_width_(out_width) {
    if (!width_ok(in_width) || !width_ok(out_width) || in_width <= out_width ||
        in_width % out_width != 0)
        throw ConfigError("downsizer: input width must be a larger multiple of output width");
    kernel.add_component(*this, domain);
}

void DownSizer::tick() {
    if (!have_) {
        if (const StreamBeat* beat = in_.front()) {
            held_ = *beat;
            in_.pop();
            consumed_ = 0;
            have_ = true;
        }
    }
    if (have_ && out_.can_push()) {
        const std::size_t total = held_.byte_count();
        const std::size_t n = std::min<std::size_t>(out_width_, total - consumed_);
        const bool final_chunk = consumed_ + n == total;
        out_.push(StreamBeat::make({held_.data.data() + consumed_, n}, out_width_,
                                   final_chunk && held_.last));
        consumed_ += n;
        if (final_chunk)
            have_ = false;
    }
}

UpSizer::UpSizer(Kernel& kernel, std::string name, DomainId domain, StreamSource& in,
                 StreamSink& out, std::uint8_t in_width, std::uint8_t out_width)
    : Component(std::move(name)), in_(in), out_(out), in_width_(in_width), out_width_(out_width) {
    if (!width_ok(in_width) || !width_ok(out_width) || out_width <= in_width ||
        out_width % in_width != 0)
        throw ConfigError("upsizer: output width must be a larger multiple of input width");
    kernel.add_component(*this, domain);
}

void UpSizer::tick() {
    if (pending_ && out_.can_push()) {
        out_.push(*pending_);
        pending_.reset();
    }
    if (pending_)
        return;  // output stalled, hold input too
    if (const StreamBeat* beat = in_.front()) {
        const std::size_t n = beat->byte_count();
        std::memcpy(packing_.data.data() + filled_, beat->data.data(), n);
        filled_ += n;
        const bool flush = beat->last || filled_ == out_width_;
        const bool last = beat->last;
        in_.pop();
        if (flush) {
            pending_ = StreamBeat::make({packing_.data.data(), filled_}, out_width_, last);
            filled_ = 0;
        }
    }
}

}  // namespace ethsim
