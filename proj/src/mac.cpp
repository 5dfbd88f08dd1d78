// SPDX-License-Identifier: Apache-2.0

#include "ethsim/mac.hpp"

#include <algorithm>

namespace ethsim {

namespace {
char hex_digit(unsigned v) {
    return static_cast<char>(v < 10 ? '0' + v : 'a' + v - 10);
}
}  // namespace

Wire::Wire(Kernel& kernel, std::string name, DomainId domain) : Component(std::move(name)) {
    kernel.add_component(*this, domain);
}

void Wire::drive(std::uint8_t octet) {
    if (staged_)
        throw ProtocolViolation("wire '" + name() + "': two drivers in one edge");
    staged_ = octet;
}

void Wire::commit() {
    committed_ = staged_;
    staged_.reset();
    if (committed_) {
        octets_++;
        if (kernel() && kernel()->tracing()) {
            char hex[5] = {'0', 'x', hex_digit(*committed_ >> 4), hex_digit(*committed_ & 0xF), 0};
            trace("octet", hex);
        }
    } else {
        trace("idle", "");
    }
}

MacTxEngine::MacTxEngine(Kernel& kernel, std::string name, DomainId domain, StreamSource& in,
                         Wire& wire, std::function<std::size_t()> staged_bytes, MacTxConfig cfg)
    : Component(std::move(name)), in_(in), wire_(wire), staged_bytes_(std::move(staged_bytes)),
      cfg_(cfg) {
    kernel.add_component(*this, domain);
}

void MacTxEngine::request_frame(std::size_t frame_len) {
    if (frame_len == 0)
        throw ConfigError("mac tx: empty frame requested");
    if (staged_request_ || request_)
        throw ProtocolViolation("mac tx '" + name() + "': frame request while one is pending");
    staged_request_ = frame_len;
    done_ = false;  // the requester must not observe the previous frame's completion
}

void MacTxEngine::begin_fcs(std::uint32_t fcs_value, bool error) {
    fcs_shift_ = fcs_value;
    state_ = State::fcs;
    emitted_ = 0;
    if (error)
        stats_.error = TxError::underrun;
}

void MacTxEngine::tick() {
    switch (state_) {
    case State::idle: {
        if (!request_)
            return;
        const std::size_t gate = std::min(*request_, cfg_.cut_through_threshold);
        if (staged_bytes_() < gate)
            return;
        frame_len_ = *request_;
        content_len_ = std::max(frame_len_, kMinContentLen);
        request_.reset();
        crc_.reset();
        emitted_ = 0;
        content_sent_ = 0;
        const std::uint64_t frames = stats_.frames;
        stats_ = TxFrameStats{};
        stats_.frames = frames;
        stats_.content_len = content_len_;
        state_ = State::preamble;
        [[fallthrough]];
    }
    case State::preamble:
        if (emitted_ < kPreambleLen) {
            wire_.drive(kPreambleOctet);
            emitted_++;
        } else {
            wire_.drive(kSfdOctet);
            stats_.sfd_time = now();
            state_ = State::payload;
            emitted_ = 0;
        }
        break;
    case State::payload: {
        std::uint8_t octet = 0x00;
        if (content_sent_ < frame_len_) {
            const StreamBeat* beat = in_.front();
            if (!beat) {
                // The wire cannot pause: abort with a complemented FCS so
                // the receiver is guaranteed to reject the frame.
                trace("underrun", emitted_);
                stats_.last_payload_time = now();
                begin_fcs(~crc_.value(), true);
                wire_.drive(static_cast<std::uint8_t>(fcs_shift_ & 0xFF));
                fcs_shift_ >>= 8;
                emitted_ = 1;
                return;
            }
            octet = beat->data[0];
            const bool was_last = beat->last;
            in_.pop();
            content_sent_++;
            if (was_last && content_sent_ != frame_len_)
                trace("length_mismatch", content_sent_);
        }
        crc_.update(octet);
        wire_.drive(octet);
        emitted_++;
        if (emitted_ == content_len_) {
            stats_.last_payload_time = now();
            begin_fcs(crc_.value(), false);
        }
        break;
    }
    case State::fcs:
        wire_.drive(static_cast<std::uint8_t>(fcs_shift_ & 0xFF));
        fcs_shift_ >>= 8;
        emitted_++;
        if (emitted_ == kFcsLen) {
            stats_.last_fcs_time = now();
            stats_.frames++;
            staged_done_ = true;
            state_ = State::ipg;
            emitted_ = 0;
        }
        break;
    case State::ipg:
        emitted_++;
        if (emitted_ >= kIpgOctets)
            state_ = State::idle;
        break;
    }
}

void MacTxEngine::commit() {
    if (staged_request_) {
        request_ = staged_request_;
        staged_request_.reset();
        done_ = false;
    }
    if (staged_done_) {
        done_ = true;
        staged_done_ = false;
    }
}

MacRxEngine::MacRxEngine(Kernel& kernel, std::string name, DomainId domain, Wire& wire,
                         StreamSink& out)
    : Component(std::move(name)), wire_(wire), out_(out) {
    kernel.add_component(*this, domain);
}

void MacRxEngine::forward(std::uint8_t octet) {
    crc_.update(octet);
    forwarded_++;
    StreamBeat beat = StreamBeat::make({&octet, 1}, 1, false);
    if (out_.can_push())
        out_.push(beat);
    else
        overflow_ = true;  // line rate lost; the frame is flagged, not recovered
}

void MacRxEngine::tick() {
    const std::optional<std::uint8_t> sym = wire_.symbol();
    switch (state_) {
    case State::hunt:
        if (sym && *sym == kPreambleOctet)
            state_ = State::preamble;
        break;
    case State::preamble:
        if (!sym) {
            state_ = State::hunt;
        } else if (*sym == kSfdOctet) {
            state_ = State::frame;
            crc_.reset();
            line_.clear();
            forwarded_ = 0;
            overflow_ = false;
            sfd_time_ = now();
        } else if (*sym != kPreambleOctet) {
            state_ = State::hunt;
        }
        break;
    case State::frame:
        if (sym) {
            line_.push_back({*sym, now()});
            // Keep four candidate FCS octets plus the would-be final content
            // octet in the line; everything older is frame content.
            if (line_.size() > kFcsLen + 1) {
                forward(line_.front().octet);
                line_.pop_front();
            }
        } else {
            end_frame();
            state_ = State::hunt;
        }
        break;
    }
}

void MacRxEngine::end_frame() {
    FrameReport report;
    report.seq = report_.seq + 1;
    report.sfd_time = sfd_time_;
    if (line_.size() == kFcsLen + 1) {
        const PendingOctet final_octet = line_.front();
        line_.pop_front();
        crc_.update(final_octet.octet);
        forwarded_++;
        if (out_.can_push())
            out_.push(StreamBeat::make({&final_octet.octet, 1}, 1, true));
        else
            overflow_ = true;

        std::uint32_t fcs = 0;
        for (int i = 0; i < 4; ++i)
            fcs |= static_cast<std::uint32_t>(line_[i].octet) << (8 * i);
        report.length = forwarded_;
        report.fcs_ok = fcs == crc_.value();
        report.overflow = overflow_;
        report.last_payload_time = final_octet.time;
        report.last_fcs_time = line_.back().time;
    } else {
        // Fragment shorter than content + FCS; nothing was forwarded.
        report.length = 0;
        report.fcs_ok = false;
        report.overflow = overflow_;
        report.last_payload_time = now();
        report.last_fcs_time = now();
    }
    trace(report.fcs_ok ? "frame_ok" : "frame_bad", report.length);
    staged_report_ = report;
    report_staged_ = true;
    line_.clear();
}

void MacRxEngine::commit() {
    if (report_staged_) {
        report_ = staged_report_;
        report_staged_ = false;
    }
}

FrameInjector::FrameInjector(Kernel& kernel, std::string name, DomainId domain, Wire& wire,
                             std::size_t gap_octets)
    : Component(std::move(name)), wire_(wire), gap_octets_(gap_octets) {
    kernel.add_component(*this, domain);
}

void FrameInjector::inject(const WireFrame& frame) {
    for (std::uint8_t octet : frame.octets) {
        queue_.push_back(octet);
        drive_.push_back(true);
    }
    for (std::size_t i = 0; i < gap_octets_; ++i) {
        queue_.push_back(0);
        drive_.push_back(false);
    }
}

void FrameInjector::tick() {
    if (queue_.empty())
        return;
    if (drive_.front())
        wire_.drive(queue_.front());
    queue_.pop_front();
    drive_.pop_front();
}

}  // namespace ethsim
