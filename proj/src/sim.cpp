// SPDX-License-Identifier: Apache-2.0

#include "ethsim/sim.hpp"

#include <algorithm>

namespace ethsim {

SimTime Component::now() const {
    return kernel_ ? kernel_->now() : SimTime{0};
}

void Component::trace(std::string_view event, std::string_view value) const {
    if (kernel_ && kernel_->tracing())
        kernel_->emit_trace(*this, event, value);
}

void Component::trace(std::string_view event, std::uint64_t value) const {
    if (kernel_ && kernel_->tracing())
        kernel_->emit_trace(*this, event, std::to_string(value));
}

CsvTraceSink::CsvTraceSink(std::ostream& out) : out_(out) {
    out_ << "time_ps,domain,edge_index,component,event,value\n";
}

void CsvTraceSink::row(std::uint64_t time_ps, std::string_view domain, std::uint64_t edge_index,
                       std::string_view component, std::string_view event, std::string_view value) {
    out_ << time_ps << ',' << domain << ',' << edge_index << ',' << component << ',' << event << ','
         << value << '\n';
}

DomainId Kernel::add_domain(std::string name, std::uint64_t period_ps, std::uint64_t phase_ps) {
    if (started_)
        throw ConfigError("kernel: cannot add clock domain after simulation start");
    if (period_ps == 0)
        throw ConfigError("kernel: clock period must be positive");
    if (kPicosPerSecond % period_ps != 0)
        throw ConfigError("kernel: clock frequency must divide 10^12 ps evenly (period " +
                          std::to_string(period_ps) + " ps rejected)");
    if (phase_ps >= period_ps)
        throw ConfigError("kernel: clock phase must be smaller than the period");
    domains_.push_back({std::move(name), period_ps, phase_ps, 0, {}});
    return domains_.size() - 1;
}

ComponentId Kernel::add_component(Component& c, DomainId domain) {
    if (started_)
        throw ConfigError("kernel: cannot register component '" + c.name() + "' after simulation start");
    if (domain >= domains_.size())
        throw ConfigError("kernel: unknown clock domain");
    c.kernel_ = this;
    c.domain_ = domain;
    domains_[domain].components.push_back(&c);
    return component_count_++;
}

std::uint64_t Kernel::edge_count(DomainId domain) const {
    if (domain >= domains_.size())
        throw ConfigError("kernel: unknown clock domain");
    return domains_[domain].edges;
}

std::uint64_t Kernel::domain_period_ps(DomainId domain) const {
    if (domain >= domains_.size())
        throw ConfigError("kernel: unknown clock domain");
    return domains_[domain].period_ps;
}

const std::string& Kernel::domain_name(DomainId domain) const {
    if (domain >= domains_.size())
        throw ConfigError("kernel: unknown clock domain");
    return domains_[domain].name;
}

DomainId Kernel::current_domain() const {
    if (!in_edge_)
        throw SimError("kernel: no edge is being processed");
    return current_domain_;
}

void Kernel::emit_trace(const Component& c, std::string_view event, std::string_view value) {
    if (!sink_)
        return;
    const Domain& d = domains_[c.domain_];
    sink_->row(now_.ps, d.name, d.edges, c.name(), event, value);
}

void Kernel::step_edge(DomainId id) {
    Domain& d = domains_[id];
    now_ = SimTime{next_edge_ps(d)};
    d.edges++;
    in_edge_ = true;
    current_domain_ = id;
    for (Component* c : d.components)
        c->tick();
    for (Component* c : d.components)
        c->commit();
    in_edge_ = false;
}

RunOutcome Kernel::run_until(const std::function<bool()>& predicate, SimTime max_time) {
    if (max_time < now_)
        throw ConfigError("kernel: run_until target lies in the past");
    if (domains_.empty())
        throw ConfigError("kernel: no clock domains configured");
    started_ = true;
    if (predicate())
        return RunOutcome::satisfied;
    for (;;) {
        // Earliest pending edge; ties resolved by domain registration order.
        DomainId next = 0;
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (DomainId i = 0; i < domains_.size(); ++i) {
            const std::uint64_t t = next_edge_ps(domains_[i]);
            if (t < best) {
                best = t;
                next = i;
            }
        }
        if (best > max_time.ps) {
            now_ = max_time;
            return RunOutcome::timed_out;
        }
        step_edge(next);
        if (predicate())
            return RunOutcome::satisfied;
    }
}

}  // namespace ethsim
