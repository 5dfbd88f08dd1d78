// SPDX-License-Identifier: Apache-2.0

#include "ethsim/dma.hpp"

#include <algorithm>

namespace ethsim {

std::vector<DmaJob> legalize(const TransferRequest& req, std::uint32_t bus_width_bytes,
                             std::uint32_t max_burst_beats) {
    if (bus_width_bytes == 0 || !std::has_single_bit(bus_width_bytes) ||
        bus_width_bytes > kMaxBeatBytes)
        throw ConfigError("legalize: bus width must be a power of two in [1, 64]");
    if (max_burst_beats == 0)
        throw ConfigError("legalize: max burst must be at least one beat");
    if (req.length == 0)
        throw ConfigError("legalize: zero-length transfer rejected");

    const std::uint64_t w = bus_width_bytes;
    std::vector<DmaJob> jobs;
    std::uint64_t cur = req.mem_addr;
    const std::uint64_t end = req.mem_addr + req.length;
    while (cur < end) {
        const std::uint64_t aligned = cur & ~(w - 1);
        const std::uint64_t burst_end = aligned + static_cast<std::uint64_t>(max_burst_beats) * w;
        const std::uint64_t page_end = (cur / kDmaPageBytes + 1) * kDmaPageBytes;
        const std::uint64_t job_end = std::min({end, burst_end, page_end});

        DmaJob job;
        job.mem_addr = cur;
        job.length = job_end - cur;
        job.first_byte_offset = static_cast<std::uint32_t>(cur % w);
        job.last_byte_offset = static_cast<std::uint32_t>((job_end - 1) % w);
        job.beats = static_cast<std::uint32_t>(((job_end - 1) / w) - (aligned / w) + 1);
        jobs.push_back(job);
        cur = job_end;
    }
    return jobs;
}

DmaEngine::DmaEngine(Kernel& kernel, std::string name, DomainId system_domain, MemoryModel& memory,
                     StreamSink* tx_out, StreamSource* rx_in, DmaConfig cfg)
    : Component(std::move(name)), kernel_(kernel), memory_(memory), tx_out_(tx_out), rx_in_(rx_in),
      cfg_(cfg) {
    if (cfg_.bus_width_bytes == 0 || !std::has_single_bit(cfg_.bus_width_bytes) ||
        cfg_.bus_width_bytes > kMaxBeatBytes)
        throw ConfigError("dma: bus width must be a power of two in [1, 64]");
    kernel.add_component(*this, system_domain);
}

void DmaEngine::submit(const TransferRequest& req) {
    if (busy())
        throw ProtocolViolation("dma '" + name() + "': submit while a request is in flight");
    if (req.length == 0)
        throw ConfigError("dma: zero-length transfer rejected");
    submitted_ = req;
}

void DmaEngine::commit() {
    if (submitted_) {
        start(*submitted_);
        submitted_.reset();
    }
}

void DmaEngine::cancel() {
    submitted_.reset();
    if (status_.state == DmaState::running)
        finish(DmaState::error, DmaError::cancelled);
    skid_.reset();
    beat_in_flight_ = false;
    write_beat_.reset();
    mem_busy_ = 0;
}

void DmaEngine::start(const TransferRequest& req) {
    active_ = req;
    status_ = DmaStatus{};
    status_.id = req.id;
    status_.state = DmaState::running;
    status_.start_edges.resize(kernel_.domain_count());
    for (DomainId d = 0; d < kernel_.domain_count(); ++d)
        status_.start_edges[d] = kernel_.edge_count(d);

    setup_remaining_ = cfg_.setup_cycles;
    mem_busy_ = 0;
    data_beats_ = 0;
    jobs_.clear();
    job_index_ = 0;
    beat_index_ = 0;
    stream_cursor_ = 0;
    repack_fill_ = 0;
    beat_in_flight_ = false;
    skid_.reset();
    write_cursor_ = 0;
    write_beat_.reset();
    last_seen_ = false;
    overflowed_ = false;

    try {
        memory_.check_range(req.mem_addr, req.length);
        if (req.direction == DmaDirection::mem_to_stream)
            jobs_ = legalize(req, cfg_.bus_width_bytes, cfg_.max_burst_beats);
    } catch (const BusFault&) {
        trace("bus_fault", req.mem_addr);
        finish(DmaState::error, DmaError::bus_fault);
        return;
    }
    trace("accept", req.length);
}

void DmaEngine::finish(DmaState state, DmaError error) {
    status_.state = state;
    status_.error = error;
    status_.end_edges.resize(kernel_.domain_count());
    for (DomainId d = 0; d < kernel_.domain_count(); ++d)
        status_.end_edges[d] = kernel_.edge_count(d);
    // Throughput ceiling: never more than one data beat per elapsed edge.
    const std::uint64_t elapsed = status_.end_edges[domain()] - status_.start_edges[domain()];
    if (data_beats_ > elapsed)
        throw SimError("dma '" + name() + "': moved " + std::to_string(data_beats_) +
                       " beats in " + std::to_string(elapsed) + " edges");
    trace(state == DmaState::done ? "done" : "error", status_.bytes_moved);
}

void DmaEngine::tick() {
    if (status_.state != DmaState::running)
        return;
    if (setup_remaining_ > 0) {
        setup_remaining_--;
        return;
    }
    if (active_.direction == DmaDirection::mem_to_stream)
        tick_read();
    else
        tick_write();
}

void DmaEngine::tick_read() {
    // A stalled beat freezes the memory pipeline, so stream stalls delay
    // completion by exactly the stall length.
    bool pushed = false;
    if (skid_) {
        if (!tx_out_->can_push())
            return;
        tx_out_->push(*skid_);
        stream_cursor_ += skid_->byte_count();
        status_.bytes_moved += skid_->byte_count();
        data_beats_++;
        skid_.reset();
        pushed = true;
        if (stream_cursor_ == active_.length) {
            finish(DmaState::done, DmaError::none);
            return;
        }
    }

    if (beat_in_flight_ && --mem_busy_ == 0) {
        memory_.read(beat_addr_, {repack_.data() + repack_fill_, beat_bytes_});
        repack_fill_ += beat_bytes_;
        beat_in_flight_ = false;
        beat_index_++;
        if (beat_index_ == jobs_[job_index_].beats) {
            job_index_++;
            beat_index_ = 0;
        }
    }

    // At most one stream beat leaves per edge; a partial beat is released
    // only once the last memory beat has arrived.
    const std::uint32_t w = cfg_.bus_width_bytes;
    const bool mem_done = job_index_ == jobs_.size() && !beat_in_flight_;
    if (!pushed && (repack_fill_ >= w || (mem_done && repack_fill_ > 0))) {
        const std::size_t n = std::min<std::size_t>(w, repack_fill_);
        const bool last = stream_cursor_ + n == active_.length;
        StreamBeat beat = StreamBeat::make({repack_.data(), n}, static_cast<std::uint8_t>(w), last);
        std::copy(repack_.begin() + n, repack_.begin() + repack_fill_, repack_.begin());
        repack_fill_ -= n;
        if (tx_out_->can_push()) {
            tx_out_->push(beat);
            stream_cursor_ += n;
            status_.bytes_moved += n;
            data_beats_++;
            if (last) {
                finish(DmaState::done, DmaError::none);
                return;
            }
        } else {
            skid_ = beat;
        }
    }

    if (!beat_in_flight_ && !skid_ && job_index_ < jobs_.size()) {
        const DmaJob& job = jobs_[job_index_];
        const std::uint64_t width = w;
        const std::uint64_t aligned = job.mem_addr & ~(width - 1);
        const std::uint64_t begin = std::max(job.mem_addr, aligned + beat_index_ * width);
        const std::uint64_t end_addr =
            std::min(job.mem_addr + job.length, aligned + (beat_index_ + 1) * width);
        beat_addr_ = begin;
        beat_bytes_ = static_cast<std::uint32_t>(end_addr - begin);
        beat_in_flight_ = true;
        mem_busy_ = memory_.read_latency();
    }
}

void DmaEngine::tick_write() {
    if (mem_busy_ > 0 && --mem_busy_ == 0) {
        const std::size_t n = write_beat_->byte_count();
        memory_.write(active_.mem_addr + write_cursor_, {write_beat_->data.data(), n});
        write_cursor_ += n;
        status_.bytes_moved += n;
        data_beats_++;
        const bool was_last = write_beat_->last;
        write_beat_.reset();
        if (was_last) {
            finish(DmaState::done, DmaError::none);
            return;
        }
    }

    if (mem_busy_ == 0 && !write_beat_ && rx_in_->front()) {
        const StreamBeat beat = *rx_in_->front();
        rx_in_->pop();
        if (!overflowed_ && write_cursor_ + beat.byte_count() > active_.length) {
            overflowed_ = true;
            trace("rx_overflow", write_cursor_ + beat.byte_count());
        }
        if (overflowed_) {
            // Drain the remainder of the packet so the FIFO does not wedge.
            if (beat.last)
                finish(DmaState::error, DmaError::rx_overflow);
            return;
        }
        write_beat_ = beat;
        mem_busy_ = memory_.write_latency();
    }
}

}  // namespace ethsim
