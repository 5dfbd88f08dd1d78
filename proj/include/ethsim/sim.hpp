// SPDX-License-Identifier: Apache-2.0
//
// Deterministic two-clock, cycle-stepped simulation kernel. Components are
// ticked on every rising edge of their clock domain; all cross-component
// state follows a compute-then-commit discipline so registration order can
// never change simulation results.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ethsim {

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration (bad clock period, registration after start, ...).
class ConfigError : public SimError {
public:
    using SimError::SimError;
};

// A component violated an interface contract (mutated a pending beat,
// ticked a FIFO port from the wrong domain, ...). Halts the simulation.
class ProtocolViolation : public SimError {
public:
    using SimError::SimError;
};

// Access outside a memory or register window.
class BusFault : public SimError {
public:
    using SimError::SimError;
};

inline constexpr std::uint64_t kPicosPerSecond = 1'000'000'000'000ull;
inline constexpr std::uint64_t kEthPeriodPs = 8000;  // 125 MHz, fixed by the line rate

struct SimTime {
    std::uint64_t ps = 0;
    friend auto operator<=>(const SimTime&, const SimTime&) = default;
};

using DomainId = std::size_t;
using ComponentId = std::size_t;

class Kernel;

class Component {
public:
    explicit Component(std::string name) : name_(std::move(name)) {}
    virtual ~Component() = default;

    Component(const Component&) = delete;
    Component& operator=(const Component&) = delete;

    // Compute phase: read committed state of other components, stage updates.
    virtual void tick() = 0;
    // Commit phase: make staged outputs visible for the next edge.
    virtual void commit() {}

    const std::string& name() const { return name_; }

protected:
    Kernel* kernel() const { return kernel_; }
    DomainId domain() const { return domain_; }
    SimTime now() const;
    void trace(std::string_view event, std::string_view value) const;
    void trace(std::string_view event, std::uint64_t value) const;

private:
    friend class Kernel;
    std::string name_;
    Kernel* kernel_ = nullptr;
    DomainId domain_ = 0;
};

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void row(std::uint64_t time_ps, std::string_view domain, std::uint64_t edge_index,
                     std::string_view component, std::string_view event, std::string_view value) = 0;
};

// Append-only CSV stream: time_ps,domain,edge_index,component,event,value
class CsvTraceSink final : public TraceSink {
public:
    explicit CsvTraceSink(std::ostream& out);
    void row(std::uint64_t time_ps, std::string_view domain, std::uint64_t edge_index,
             std::string_view component, std::string_view event, std::string_view value) override;

private:
    std::ostream& out_;
};

enum class RunOutcome { satisfied, timed_out };

class Kernel {
public:
    Kernel() = default;

    // Clock periods must divide one second evenly so edge timestamps stay
    // exact integer picosecond multiples over arbitrarily long runs.
    DomainId add_domain(std::string name, std::uint64_t period_ps, std::uint64_t phase_ps = 0);

    // Components bound to the same domain tick in registration order on
    // every rising edge. Registration is only legal before the first run.
    ComponentId add_component(Component& c, DomainId domain);

    RunOutcome run_until(const std::function<bool()>& predicate, SimTime max_time);

    SimTime now() const { return now_; }
    std::uint64_t edge_count(DomainId domain) const;
    std::size_t domain_count() const { return domains_.size(); }
    std::uint64_t domain_period_ps(DomainId domain) const;
    const std::string& domain_name(DomainId domain) const;
    bool started() const { return started_; }

    void set_trace_sink(TraceSink* sink) { sink_ = sink; }
    bool tracing() const { return sink_ != nullptr; }

    // Domain currently processing an edge; only valid from within a tick
    // or commit callback.
    bool in_edge() const { return in_edge_; }
    DomainId current_domain() const;

    void emit_trace(const Component& c, std::string_view event, std::string_view value);

private:
    struct Domain {
        std::string name;
        std::uint64_t period_ps = 0;
        std::uint64_t phase_ps = 0;
        std::uint64_t edges = 0;
        std::vector<Component*> components;
    };

    std::uint64_t next_edge_ps(const Domain& d) const { return d.phase_ps + (d.edges + 1) * d.period_ps; }
    void step_edge(DomainId id);

    std::vector<Domain> domains_;
    std::size_t component_count_ = 0;
    SimTime now_{0};
    bool started_ = false;
    bool in_edge_ = false;
    DomainId current_domain_ = 0;
    TraceSink* sink_ = nullptr;
};

}  // namespace ethsim
