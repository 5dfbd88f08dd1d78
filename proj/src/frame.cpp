// SPDX-License-Identifier: Apache-2.0

#include "ethsim/frame.hpp"

#include <algorithm>

#include "ethsim/sim.hpp"

namespace ethsim {
namespace {

constexpr std::uint32_t kPolyReflected = 0xEDB88320u;

constexpr std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t n = 0; n < 256; ++n) {
        std::uint32_t c = n;
        for (int k = 0; k < 8; ++k)
            c = (c & 1u) ? (kPolyReflected ^ (c >> 1)) : (c >> 1);
        table[n] = c;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

}  // namespace

void Crc32::update(std::uint8_t octet) {
    state_ = kCrcTable[(state_ ^ octet) & 0xFFu] ^ (state_ >> 8);
}

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    Crc32 crc;
    for (std::uint8_t b : data)
        crc.update(b);
    return crc.value();
}

WireFrame encode(const EthernetFrame& frame) {
    if (frame.payload.size() > kMaxPayloadLen)
        throw ConfigError("encode: payload exceeds " + std::to_string(kMaxPayloadLen) + " bytes");

    WireFrame wire;
    const std::size_t content_len = kHeaderLen + std::max(frame.payload.size(), kMinPayloadLen);
    wire.octets.reserve(kPreambleLen + 1 + content_len + kFcsLen);

    wire.octets.insert(wire.octets.end(), kPreambleLen, kPreambleOctet);
    wire.octets.push_back(kSfdOctet);

    const std::size_t content_begin = wire.octets.size();
    wire.octets.insert(wire.octets.end(), frame.dst.octets.begin(), frame.dst.octets.end());
    wire.octets.insert(wire.octets.end(), frame.src.octets.begin(), frame.src.octets.end());
    wire.octets.push_back(static_cast<std::uint8_t>(frame.ethertype >> 8));
    wire.octets.push_back(static_cast<std::uint8_t>(frame.ethertype & 0xFF));
    wire.octets.insert(wire.octets.end(), frame.payload.begin(), frame.payload.end());
    if (frame.payload.size() < kMinPayloadLen)
        wire.octets.insert(wire.octets.end(), kMinPayloadLen - frame.payload.size(), 0x00);

    const std::uint32_t fcs = crc32(
        std::span<const std::uint8_t>(wire.octets.data() + content_begin, content_len));
    for (int i = 0; i < 4; ++i)
        wire.octets.push_back(static_cast<std::uint8_t>((fcs >> (8 * i)) & 0xFF));
    return wire;
}

std::variant<EthernetFrame, DecodeError> decode(std::span<const std::uint8_t> octets) {
    if (octets.size() < kMinWireLen)
        return DecodeError::Runt;
    for (std::size_t i = 0; i < kPreambleLen; ++i)
        if (octets[i] != kPreambleOctet)
            return DecodeError::BadPreamble;
    if (octets[kPreambleLen] != kSfdOctet)
        return DecodeError::BadSfd;

    const auto content = octets.subspan(kPreambleLen + 1, octets.size() - kPreambleLen - 1 - kFcsLen);
    const auto fcs_bytes = octets.subspan(octets.size() - kFcsLen);
    std::uint32_t fcs = 0;
    for (int i = 0; i < 4; ++i)
        fcs |= static_cast<std::uint32_t>(fcs_bytes[i]) << (8 * i);
    if (crc32(content) != fcs)
        return DecodeError::BadFcs;

    EthernetFrame frame;
    std::copy_n(content.begin(), 6, frame.dst.octets.begin());
    std::copy_n(content.begin() + 6, 6, frame.src.octets.begin());
    frame.ethertype = static_cast<std::uint16_t>((content[12] << 8) | content[13]);

    auto body = content.subspan(kHeaderLen);
    // An ethertype below 1536 is an 802.3 length field, which lets us strip
    // the minimum-size padding; otherwise the payload is returned as received.
    if (frame.ethertype < kEthertypeMin && frame.ethertype <= body.size())
        body = body.first(frame.ethertype);
    frame.payload.assign(body.begin(), body.end());
    return frame;
}

}  // namespace ethsim
