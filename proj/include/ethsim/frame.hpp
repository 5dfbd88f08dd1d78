// SPDX-License-Identifier: Apache-2.0
//
// IEEE 802.3 wire-frame construction and parsing: preamble/SFD, header,
// minimum-size padding and the CRC-32 frame check sequence. Everything in
// this header is a pure function over byte sequences.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace ethsim {

inline constexpr std::uint8_t kPreambleOctet = 0x55;
inline constexpr std::uint8_t kSfdOctet = 0xD5;
inline constexpr std::size_t kPreambleLen = 7;
inline constexpr std::size_t kHeaderLen = 14;       // dst + src + ethertype
inline constexpr std::size_t kFcsLen = 4;
inline constexpr std::size_t kMinContentLen = 60;   // header + payload + pad, FCS excluded
inline constexpr std::size_t kMinPayloadLen = 46;
inline constexpr std::size_t kMaxPayloadLen = 1500;
inline constexpr std::size_t kMinWireLen = 72;      // 8 + 14 + 46 + 4
inline constexpr std::size_t kIpgOctets = 12;
// Ethertype values below this are 802.3 length fields.
inline constexpr std::uint16_t kEthertypeMin = 1536;

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};
    friend bool operator==(const MacAddress&, const MacAddress&) = default;
};

struct EthernetFrame {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ethertype = 0;
    std::vector<std::uint8_t> payload;
    friend bool operator==(const EthernetFrame&, const EthernetFrame&) = default;
};

// Exact on-wire octet sequence: preamble, SFD, header, payload, pad, FCS.
struct WireFrame {
    std::vector<std::uint8_t> octets;
    friend bool operator==(const WireFrame&, const WireFrame&) = default;
};

enum class DecodeError { BadPreamble, BadSfd, Runt, BadFcs };

// Ethernet FCS: reflected CRC-32, polynomial 0x04C11DB7, initial value
// all-ones, final complement. The FCS travels least-significant byte first.
std::uint32_t crc32(std::span<const std::uint8_t> data);

// Octet-at-a-time CRC state, finalizes to the same value as one-shot crc32().
class Crc32 {
public:
    void reset() { state_ = 0xFFFFFFFFu; }
    void update(std::uint8_t octet);
    std::uint32_t value() const { return ~state_; }

private:
    std::uint32_t state_ = 0xFFFFFFFFu;
};

// Throws ConfigError if the payload exceeds the 1500-byte MTU.
WireFrame encode(const EthernetFrame& frame);

std::variant<EthernetFrame, DecodeError> decode(std::span<const std::uint8_t> octets);

}  // namespace ethsim
