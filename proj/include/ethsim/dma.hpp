// SPDX-License-Identifier: Apache-2.0
//
// DMA engine: legalizes one-dimensional transfer requests into page- and
// burst-bounded jobs, then moves data one bus beat per system cycle between
// memory and the stream endpoints, honoring memory latency and stream
// backpressure. One request is in flight at a time.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ethsim/soc.hpp"
#include "ethsim/stream.hpp"

namespace ethsim {

inline constexpr std::uint64_t kDmaPageBytes = 4096;
inline constexpr std::uint32_t kDefaultMaxBurstBeats = 256;

enum class DmaDirection { mem_to_stream, stream_to_mem };

struct TransferRequest {
    std::uint64_t id = 0;
    DmaDirection direction = DmaDirection::mem_to_stream;
    std::uint64_t mem_addr = 0;
    std::uint64_t length = 0;  // mem_to_stream: exact bytes; stream_to_mem: capacity bound
};

// One burst-bounded slice of a request. The byte span never crosses a 4 KiB
// page and covers at most max_burst_beats bus beats; unaligned ends are
// expressed as byte offsets into the first and last beat.
struct DmaJob {
    std::uint64_t mem_addr = 0;
    std::uint64_t length = 0;
    std::uint32_t beats = 0;
    std::uint32_t first_byte_offset = 0;  // first valid byte within the first beat
    std::uint32_t last_byte_offset = 0;   // last valid byte within the last beat
    friend bool operator==(const DmaJob&, const DmaJob&) = default;
};

std::vector<DmaJob> legalize(const TransferRequest& req, std::uint32_t bus_width_bytes,
                             std::uint32_t max_burst_beats = kDefaultMaxBurstBeats);

enum class DmaState { idle, running, done, error };
enum class DmaError { none, bus_fault, rx_overflow, cancelled };

struct DmaStatus {
    std::uint64_t id = 0;
    DmaState state = DmaState::idle;
    DmaError error = DmaError::none;
    std::uint64_t bytes_moved = 0;
    std::vector<std::uint64_t> start_edges;  // per kernel domain, at request acceptance
    std::vector<std::uint64_t> end_edges;    // per kernel domain, at completion
};

struct DmaConfig {
    std::uint32_t bus_width_bytes = 8;
    std::uint32_t max_burst_beats = kDefaultMaxBurstBeats;
    unsigned setup_cycles = 4;  // request acceptance cost, system cycles
};

class DmaEngine final : public Component {
public:
    DmaEngine(Kernel& kernel, std::string name, DomainId system_domain, MemoryModel& memory,
              StreamSink* tx_out, StreamSource* rx_in, DmaConfig cfg = {});

    // Staged; the engine starts on the edge after the submitting one.
    void submit(const TransferRequest& req);
    const DmaStatus& status() const { return status_; }
    bool busy() const { return status_.state == DmaState::running || submitted_.has_value(); }

    // Reset line: abandons the in-flight request. Error recovery only.
    void cancel();

    void tick() override;
    void commit() override;

private:
    void start(const TransferRequest& req);
    void finish(DmaState state, DmaError error);
    void tick_read();   // mem_to_stream
    void tick_write();  // stream_to_mem

    Kernel& kernel_;
    MemoryModel& memory_;
    StreamSink* tx_out_;
    StreamSource* rx_in_;
    DmaConfig cfg_;

    DmaStatus status_;
    std::optional<TransferRequest> submitted_;  // staged request
    TransferRequest active_{};
    unsigned setup_remaining_ = 0;
    unsigned mem_busy_ = 0;
    std::uint64_t data_beats_ = 0;

    // mem_to_stream state
    std::vector<DmaJob> jobs_;
    std::size_t job_index_ = 0;
    std::uint32_t beat_index_ = 0;       // within the current job
    std::uint64_t stream_cursor_ = 0;    // bytes handed to the stream so far
    std::array<std::uint8_t, kMaxBeatBytes * 2> repack_{};
    std::size_t repack_fill_ = 0;
    bool beat_in_flight_ = false;
    std::uint64_t beat_addr_ = 0;
    std::uint32_t beat_bytes_ = 0;
    std::optional<StreamBeat> skid_;

    // stream_to_mem state
    std::uint64_t write_cursor_ = 0;
    std::optional<StreamBeat> write_beat_;
    bool last_seen_ = false;
    bool overflowed_ = false;
};

}  // namespace ethsim
