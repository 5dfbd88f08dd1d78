// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ethsim/frame.hpp"
#include "ethsim/sim.hpp"

using namespace ethsim;

namespace {

std::uint32_t reverse32(std::uint32_t v) {
    std::uint32_t r = 0;
    for (int i = 0; i < 32; ++i) {
        r = (r << 1) | (v & 1u);
        v >>= 1;
    }
    return r;
}

// Reference implementation written directly from the generator polynomial
// 0x04C11DB7: a bit-serial LFSR fed message bits LSB-first, register seeded
// all-ones, result complemented and bit-reversed. Independent of the
// table-driven implementation under test.
std::uint32_t crc32_bitserial(std::span<const std::uint8_t> data) {
    std::uint32_t reg = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) {
        for (int bit = 0; bit < 8; ++bit) {
            const std::uint32_t in = (byte >> bit) & 1u;
            const std::uint32_t msb = (reg >> 31) & 1u;
            reg <<= 1;
            if (msb ^ in)
                reg ^= 0x04C11DB7u;
        }
    }
    return reverse32(~reg);
}

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v)
        b = static_cast<std::uint8_t>(rng() & 0xFF);
    return v;
}

EthernetFrame random_frame(std::mt19937_64& rng, std::size_t payload_len) {
    EthernetFrame f;
    for (auto& o : f.dst.octets)
        o = static_cast<std::uint8_t>(rng() & 0xFF);
    for (auto& o : f.src.octets)
        o = static_cast<std::uint8_t>(rng() & 0xFF);
    f.ethertype = static_cast<std::uint16_t>(1536 + (rng() % (65536 - 1536)));
    f.payload = random_bytes(rng, payload_len);
    return f;
}

}  // namespace

TEST_CASE("crc32 check value") {
    const std::uint8_t msg[] = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    CHECK(crc32_bitserial(msg) == 0xCBF43926u);  // oracle agrees with the published check value
    CHECK(crc32(msg) == 0xCBF43926u);
}

TEST_CASE("crc32 of empty input") {
    CHECK(crc32({}) == 0x00000000u);
    CHECK(crc32_bitserial({}) == 0x00000000u);
}

TEST_CASE("crc32 is pure") {
    const std::uint8_t msg[] = {0xDE, 0xAD, 0xBE, 0xEF};
    CHECK(crc32(msg) == crc32(msg));
}

TEST_CASE("crc32 table implementation matches the bit-serial oracle") {
    std::mt19937_64 rng(0xC0FFEE);
    for (int i = 0; i < 10000; ++i) {
        const auto data = random_bytes(rng, rng() % 64);
        CAPTURE(i);
        REQUIRE(crc32(data) == crc32_bitserial(data));
    }
}

TEST_CASE("streaming crc32 finalizes like the one-shot function") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto data = random_bytes(rng, 1 + rng() % 1500);
        Crc32 crc;
        for (std::uint8_t b : data)
            crc.update(b);
        CHECK(crc.value() == crc32(data));
    }
}

TEST_CASE("encode wire lengths") {
    std::mt19937_64 rng(1);
    CHECK(encode(random_frame(rng, 46)).octets.size() == 72);
    CHECK(encode(random_frame(rng, 10)).octets.size() == 72);  // padded to the minimum
    CHECK(encode(random_frame(rng, 1024)).octets.size() == 1050);
}

TEST_CASE("encode pads with zero bytes and appends the FCS LSB first") {
    std::mt19937_64 rng(2);
    EthernetFrame f = random_frame(rng, 10);
    const WireFrame wire = encode(f);
    for (std::size_t i = 8 + 14 + 10; i < wire.octets.size() - 4; ++i)
        CHECK(wire.octets[i] == 0x00);
    const auto content = std::span<const std::uint8_t>(wire.octets).subspan(8, 60);
    const std::uint32_t fcs = crc32_bitserial(content);
    for (int i = 0; i < 4; ++i)
        CHECK(wire.octets[wire.octets.size() - 4 + i] == ((fcs >> (8 * i)) & 0xFF));
}

TEST_CASE("encode rejects oversize payloads") {
    std::mt19937_64 rng(3);
    CHECK_THROWS_AS(encode(random_frame(rng, 1501)), ConfigError);
}

TEST_CASE("decode round-trips encode") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const EthernetFrame f = random_frame(rng, 46 + rng() % (1500 - 46 + 1));
        const auto result = decode(encode(f).octets);
        REQUIRE(std::holds_alternative<EthernetFrame>(result));
        CHECK(std::get<EthernetFrame>(result) == f);
    }
}

TEST_CASE("decode strips padding when the ethertype is a length field") {
    std::mt19937_64 rng(5);
    EthernetFrame f = random_frame(rng, 10);
    f.ethertype = 10;  // 802.3 length
    const auto result = decode(encode(f).octets);
    REQUIRE(std::holds_alternative<EthernetFrame>(result));
    CHECK(std::get<EthernetFrame>(result).payload == f.payload);
}

TEST_CASE("decode keeps padding when the ethertype is a protocol id") {
    std::mt19937_64 rng(6);
    EthernetFrame f = random_frame(rng, 10);
    f.ethertype = 0x0800;
    const auto result = decode(encode(f).octets);
    REQUIRE(std::holds_alternative<EthernetFrame>(result));
    CHECK(std::get<EthernetFrame>(result).payload.size() == 46);  // pad retained
}

TEST_CASE("decode rejects runts") {
    std::mt19937_64 rng(8);
    WireFrame wire = encode(random_frame(rng, 46));
    wire.octets.resize(60);
    const auto result = decode(wire.octets);
    REQUIRE(std::holds_alternative<DecodeError>(result));
    CHECK(std::get<DecodeError>(result) == DecodeError::Runt);
}

TEST_CASE("decode identifies preamble and SFD damage") {
    std::mt19937_64 rng(9);
    const WireFrame wire = encode(random_frame(rng, 46));

    WireFrame bad_preamble = wire;
    bad_preamble.octets[3] = 0x00;
    auto r1 = decode(bad_preamble.octets);
    REQUIRE(std::holds_alternative<DecodeError>(r1));
    CHECK(std::get<DecodeError>(r1) == DecodeError::BadPreamble);

    WireFrame bad_sfd = wire;
    bad_sfd.octets[7] = 0x5D;
    auto r2 = decode(bad_sfd.octets);
    REQUIRE(std::holds_alternative<DecodeError>(r2));
    CHECK(std::get<DecodeError>(r2) == DecodeError::BadSfd);
}

TEST_CASE("any single-bit corruption after the SFD is rejected") {
    std::mt19937_64 rng(10);
    const WireFrame wire = encode(random_frame(rng, 46));
    REQUIRE(wire.octets.size() == 72);
    for (std::size_t octet = 8; octet < 72; ++octet) {
        for (int bit = 0; bit < 8; ++bit) {
            WireFrame corrupt = wire;
            corrupt.octets[octet] ^= static_cast<std::uint8_t>(1u << bit);
            const auto result = decode(corrupt.octets);
            CAPTURE(octet);
            CAPTURE(bit);
            REQUIRE(std::holds_alternative<DecodeError>(result));
            CHECK(std::get<DecodeError>(result) == DecodeError::BadFcs);
        }
    }
}
