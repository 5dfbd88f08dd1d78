// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <random>

#include "ethsim/stream.hpp"

using namespace ethsim;

namespace {

StreamBeat byte_beat(std::uint8_t b, bool last = false) {
    return StreamBeat::make({&b, 1}, 1, last);
}

// Pushes queued beats whenever the sink accepts them, with an optional
// per-edge stall pattern.
class Feeder final : public Component {
public:
    Feeder(Kernel& k, DomainId d, StreamSink& out) : Component("feeder"), out_(out) {
        k.add_component(*this, d);
    }
    void tick() override {
        if (stall && stall())
            return;
        if (!beats.empty() && out_.can_push()) {
            out_.push(beats.front());
            beats.pop_front();
        }
    }
    std::deque<StreamBeat> beats;
    std::function<bool()> stall;

private:
    StreamSink& out_;
};

class Collector final : public Component {
public:
    Collector(Kernel& k, DomainId d, StreamSource& in) : Component("collector"), in_(in) {
        k.add_component(*this, d);
    }
    void tick() override {
        if (stall && stall())
            return;
        if (in_.front()) {
            beats.push_back(*in_.front());
            edges.push_back(kernel()->edge_count(domain()));
            in_.pop();
        }
    }
    std::vector<StreamBeat> beats;
    std::vector<std::uint64_t> edges;
    std::function<bool()> stall;

    std::vector<std::uint8_t> bytes() const {
        std::vector<std::uint8_t> out;
        for (const StreamBeat& b : beats)
            out.insert(out.end(), b.data.begin(), b.data.begin() + b.byte_count());
        return out;
    }

private:
    StreamSource& in_;
};

struct ChannelRig {
    Kernel kernel;
    DomainId domain;
    StreamChannel channel;
    Feeder feeder;
    Collector collector;

    explicit ChannelRig(std::uint8_t width = 1)
        : domain(kernel.add_domain("clk", 8000)),
          channel(kernel, "ch", domain, width),
          feeder(kernel, domain, channel),
          collector(kernel, domain, channel) {}

    void run_edges(std::uint64_t n) {
        const std::uint64_t target = kernel.edge_count(domain) + n;
        kernel.run_until([&] { return kernel.edge_count(domain) >= target; },
                         SimTime{kernel.now().ps + (n + 1) * 8000});
    }
};

}  // namespace

TEST_CASE("beat keep masks must be a contiguous prefix") {
    std::uint8_t data[4] = {1, 2, 3, 4};
    StreamBeat ok = StreamBeat::make({data, 4}, 4, false);
    CHECK(ok.well_formed());
    CHECK(ok.byte_count() == 4);

    StreamBeat gap = ok;
    gap.keep = 0b1011;
    CHECK(!gap.well_formed());

    StreamBeat partial_mid = StreamBeat::make({data, 2}, 4, true);
    CHECK(partial_mid.well_formed());
    partial_mid.last = false;  // partial beats are only legal at end of packet
    CHECK(!partial_mid.well_formed());
}

TEST_CASE("channel transfers exactly on valid and ready") {
    ChannelRig rig;
    rig.feeder.beats.push_back(byte_beat(0xAA, true));
    rig.run_edges(4);
    REQUIRE(rig.collector.beats.size() == 1);
    CHECK(rig.collector.beats[0].data[0] == 0xAA);
    CHECK(rig.collector.beats[0].last);
    CHECK(rig.channel.counters().transferred == 1);
}

TEST_CASE("channel sustains one beat per edge when unstalled") {
    ChannelRig rig;
    for (int i = 0; i < 64; ++i)
        rig.feeder.beats.push_back(byte_beat(static_cast<std::uint8_t>(i), i == 63));
    rig.run_edges(70);
    CHECK(rig.collector.beats.size() == 64);
    CHECK(rig.channel.counters().transferred == 64);
}

TEST_CASE("consumer backpressure holds the pending beat unchanged") {
    ChannelRig rig;
    rig.feeder.beats.push_back(byte_beat(0x11, false));
    rig.feeder.beats.push_back(byte_beat(0x22, true));
    int stall_left = 5;
    rig.collector.stall = [&] { return stall_left-- > 0; };
    rig.run_edges(16);
    REQUIRE(rig.collector.beats.size() == 2);
    CHECK(rig.collector.beats[0].data[0] == 0x11);
    CHECK(rig.collector.beats[1].data[0] == 0x22);
    CHECK(rig.channel.counters().stalled_ready >= 4);  // beat waited out the stall
}

TEST_CASE("channel classifies idle and starved edges") {
    ChannelRig rig;
    rig.run_edges(3);
    // Collector is always ready, so an empty channel counts starved edges.
    CHECK(rig.channel.counters().stalled_valid == 3);
    CHECK(rig.channel.counters().transferred == 0);
}

TEST_CASE("producer cannot modify a pending beat") {
    Kernel k;
    const DomainId d = k.add_domain("clk", 8000);
    StreamChannel ch(k, "ch", d, 1);
    struct Violator final : Component {
        StreamChannel& ch;
        explicit Violator(StreamChannel& c) : Component("violator"), ch(c) {}
        void tick() override {
            std::uint8_t b = 1;
            ch.push(StreamBeat::make({&b, 1}, 1, false));
            b = 2;
            ch.push(StreamBeat::make({&b, 1}, 1, false));  // second push, beat still pending
        }
    } v{ch};
    k.add_component(v, d);
    CHECK_THROWS_AS(k.run_until([] { return false; }, SimTime{8000}), ProtocolViolation);
}

TEST_CASE("downsizer splits beats lowest-addressed byte first") {
    Kernel kernel;
    const DomainId d = kernel.add_domain("clk", 8000);
    StreamChannel wide(kernel, "wide", d, 8);
    StreamChannel narrow(kernel, "narrow", d, 1);
    Feeder feeder(kernel, d, wide);
    DownSizer sizer(kernel, "down", d, wide, narrow, 8, 1);
    Collector collector(kernel, d, narrow);

    const std::uint8_t bytes[8] = {10, 11, 12, 13, 14, 15, 16, 17};
    feeder.beats.push_back(StreamBeat::make(bytes, 8, true));
    feeder.beats.push_back(StreamBeat::make({bytes, 3}, 8, true));  // partial last beat

    kernel.run_until([&] { return collector.beats.size() == 11; }, SimTime{1'000'000});
    REQUIRE(collector.beats.size() == 11);
    for (int i = 0; i < 8; ++i) {
        CHECK(collector.beats[i].data[0] == 10 + i);
        CHECK(collector.beats[i].last == (i == 7));
    }
    for (int i = 0; i < 3; ++i) {
        CHECK(collector.beats[8 + i].data[0] == 10 + i);
        CHECK(collector.beats[8 + i].last == (i == 2));
    }
    // One output beat per edge while unstalled, across the refill boundary.
    for (std::size_t i = 1; i < collector.edges.size(); ++i)
        CHECK(collector.edges[i] == collector.edges[i - 1] + 1);
}

TEST_CASE("upsizer packs and flushes early on last") {
    Kernel kernel;
    const DomainId d = kernel.add_domain("clk", 8000);
    StreamChannel narrow(kernel, "narrow", d, 1);
    StreamChannel wide(kernel, "wide", d, 4);
    Feeder feeder(kernel, d, narrow);
    UpSizer sizer(kernel, "up", d, narrow, wide, 1, 4);
    Collector collector(kernel, d, wide);

    for (int i = 0; i < 4; ++i)
        feeder.beats.push_back(byte_beat(static_cast<std::uint8_t>(0x40 + i), i == 3));
    for (int i = 0; i < 3; ++i)
        feeder.beats.push_back(byte_beat(static_cast<std::uint8_t>(0x50 + i), i == 2));

    kernel.run_until([&] { return collector.beats.size() == 2; }, SimTime{1'000'000});
    REQUIRE(collector.beats.size() == 2);
    CHECK(collector.beats[0].keep == 0b1111);
    CHECK(collector.beats[0].last);
    CHECK(collector.beats[0].data[0] == 0x40);
    CHECK(collector.beats[0].data[3] == 0x43);
    CHECK(collector.beats[1].keep == 0b0111);
    CHECK(collector.beats[1].last);
}

TEST_CASE("a 1050-byte packet upsizes to 132 beats with a 2-byte tail") {
    Kernel kernel;
    const DomainId d = kernel.add_domain("clk", 8000);
    StreamChannel narrow(kernel, "narrow", d, 1);
    StreamChannel wide(kernel, "wide", d, 8);
    Feeder feeder(kernel, d, narrow);
    UpSizer sizer(kernel, "up", d, narrow, wide, 1, 8);
    Collector collector(kernel, d, wide);

    for (int i = 0; i < 1050; ++i)
        feeder.beats.push_back(byte_beat(static_cast<std::uint8_t>(i), i == 1049));
    kernel.run_until([&] { return collector.beats.size() == 132; }, SimTime{100'000'000});
    REQUIRE(collector.beats.size() == 132);
    CHECK(collector.beats.back().byte_count() == 2);
    CHECK(collector.beats.back().last);
}

TEST_CASE("upsize of downsize is the identity under random stalls") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 20; ++round) {
        Kernel kernel;
        const DomainId d = kernel.add_domain("clk", 8000);
        StreamChannel in(kernel, "in", d, 8);
        StreamChannel mid(kernel, "mid", d, 1);
        StreamChannel out(kernel, "out", d, 8);
        Feeder feeder(kernel, d, in);
        DownSizer down(kernel, "down", d, in, mid, 8, 1);
        UpSizer up(kernel, "up", d, mid, out, 1, 8);
        Collector collector(kernel, d, out);

        // Random packets; every packet a whole number of beats except a
        // random partial tail.
        std::vector<StreamBeat> sent;
        const int packets = 1 + static_cast<int>(rng() % 4);
        for (int p = 0; p < packets; ++p) {
            const std::size_t len = 1 + rng() % 64;
            std::vector<std::uint8_t> bytes(len);
            for (auto& b : bytes)
                b = static_cast<std::uint8_t>(rng() & 0xFF);
            for (std::size_t i = 0; i < len; i += 8) {
                const std::size_t n = std::min<std::size_t>(8, len - i);
                sent.push_back(StreamBeat::make({bytes.data() + i, n}, 8, i + n == len));
            }
        }
        for (const auto& b : sent)
            feeder.beats.push_back(b);
        auto coin = [&rng] { return (rng() & 3) == 0; };
        feeder.stall = coin;
        collector.stall = coin;

        kernel.run_until([&] { return collector.beats.size() == sent.size(); },
                         SimTime{100'000'000});
        REQUIRE(collector.beats.size() == sent.size());
        for (std::size_t i = 0; i < sent.size(); ++i) {
            CAPTURE(i);
            CHECK(collector.beats[i] == sent[i]);
        }
    }
}

TEST_CASE("sizer width ratios must divide evenly") {
    Kernel k;
    const DomainId d = k.add_domain("clk", 8000);
    StreamChannel a(k, "a", d, 8);
    StreamChannel b(k, "b", d, 1);
    CHECK_THROWS_AS(DownSizer(k, "bad", d, a, b, 1, 8), ConfigError);
    CHECK_THROWS_AS(UpSizer(k, "bad", d, a, b, 8, 1), ConfigError);
}

namespace {

struct CdcRig {
    Kernel kernel;
    DomainId wr;
    DomainId rd;
    CdcFifo fifo;
    Feeder feeder;
    Collector collector;

    explicit CdcRig(std::size_t depth = 32, unsigned sync_stages = 2, std::uint8_t width = 8,
                    std::uint64_t wr_period = 20000, std::uint64_t rd_period = 8000)
        : wr(kernel.add_domain("wr", wr_period)),
          rd(kernel.add_domain("rd", rd_period)),
          fifo(kernel, "fifo", wr, rd, width, {depth, sync_stages}),
          feeder(kernel, wr, fifo),
          collector(kernel, rd, fifo) {}
};

}  // namespace

TEST_CASE("cdc visibility honors the synchronizer latency") {
    CdcRig rig(32, 2, 1, 8000, 8000);
    rig.feeder.beats.push_back(byte_beat(0x5A, true));

    // The write lands at the first write edge; the reader may see it no
    // earlier than two read edges later and pops one edge after that.
    rig.kernel.run_until([&] { return !rig.collector.beats.empty(); }, SimTime{1'000'000});
    CHECK(rig.kernel.edge_count(rig.rd) >= 3);
    REQUIRE(rig.collector.beats.size() == 1);
    CHECK(rig.collector.beats[0].data[0] == 0x5A);
}

TEST_CASE("cdc full flag stops writes without losing any") {
    CdcRig rig(8, 2, 1, 8000, 8000);
    // Consumer never pops.
    rig.collector.stall = [] { return true; };
    for (int i = 0; i < 16; ++i)
        rig.feeder.beats.push_back(byte_beat(static_cast<std::uint8_t>(i), false));

    rig.kernel.run_until([&] { return rig.fifo.occupancy() == 8; }, SimTime{10'000'000});
    CHECK(rig.fifo.occupancy() == 8);
    CHECK(rig.feeder.beats.size() == 8);  // remainder still queued, none dropped

    // Resume draining; everything arrives in order.
    rig.collector.stall = nullptr;
    rig.kernel.run_until([&] { return rig.collector.beats.size() == 16; }, SimTime{20'000'000});
    for (int i = 0; i < 16; ++i)
        CHECK(rig.collector.beats[i].data[0] == i);
}

TEST_CASE("cdc preserves order and loses nothing under random stalls") {
    std::mt19937_64 rng(2024);
    CdcRig rig;
    std::deque<StreamBeat> oracle;  // plain queue model
    constexpr int kItems = 10'000;
    for (int i = 0; i < kItems; ++i) {
        std::array<std::uint8_t, 8> bytes{};
        for (auto& b : bytes)
            b = static_cast<std::uint8_t>(rng() & 0xFF);
        const StreamBeat beat = StreamBeat::make({bytes.data(), 8}, 8, i == kItems - 1);
        rig.feeder.beats.push_back(beat);
        oracle.push_back(beat);
    }
    std::mt19937_64 stall_rng(7);
    rig.feeder.stall = [&] { return (stall_rng() & 3) == 0; };
    rig.collector.stall = [&] { return (stall_rng() & 3) == 0; };

    rig.kernel.run_until([&] { return rig.collector.beats.size() == kItems; },
                         SimTime{20'000'000'000ull});
    REQUIRE(rig.collector.beats.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CAPTURE(i);
        REQUIRE(rig.collector.beats[i] == oracle[i]);
    }
    CHECK(rig.fifo.max_occupancy() <= rig.fifo.depth());
    CHECK(rig.fifo.occupancy() == 0);
}

TEST_CASE("cdc access from the wrong domain is a protocol violation") {
    Kernel kernel;
    const DomainId wr = kernel.add_domain("wr", 20000);
    const DomainId rd = kernel.add_domain("rd", 8000);
    CdcFifo fifo(kernel, "fifo", wr, rd, 1, {8, 2});
    // A popper running in the write domain must fault.
    struct BadPopper final : Component {
        CdcFifo& fifo;
        explicit BadPopper(CdcFifo& f) : Component("bad"), fifo(f) {}
        void tick() override { fifo.pop(); }
    } bad{fifo};
    kernel.add_component(bad, wr);
    CHECK_THROWS_AS(kernel.run_until([] { return false; }, SimTime{100'000}), ProtocolViolation);
}

TEST_CASE("cdc configuration is validated") {
    Kernel k;
    const DomainId wr = k.add_domain("wr", 20000);
    const DomainId rd = k.add_domain("rd", 8000);
    CHECK_THROWS_AS(CdcFifo(k, "f", wr, rd, 8, {3, 2}), ConfigError);   // depth not a power of two
    CHECK_THROWS_AS(CdcFifo(k, "f", wr, rd, 8, {8, 1}), ConfigError);   // too few sync stages
    CHECK_THROWS_AS(CdcFifo(k, "f", wr, rd, 3, {8, 2}), ConfigError);   // width not a power of two
}
