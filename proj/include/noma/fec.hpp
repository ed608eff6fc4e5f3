#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noma/types.hpp"

namespace noma {

using BitVector = std::vector<std::uint8_t>;

// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF), bit-level, MSB-first.
// attach appends 16 parity bits; check is true iff the running register over
// payload+parity is zero. attach rejects an empty payload.
BitVector crc16_attach(std::span<const std::uint8_t> payload);
bool crc16_check(std::span<const std::uint8_t> bits);

// Rate-1/2 terminated convolutional code, constraint length 7, generators
// (133,171) octal, rate-matched to payload_bits / rate coded bits by even
// puncturing or cyclic repetition of the mother codeword.
struct CodeConfig {
  int payload_bits = 0;  // encoder input length (CRC already attached)
  double rate = 0.5;
  std::uint64_t interleaver_seed = 0;

  int mother_bits() const { return 2 * (payload_bits + 6); }
  int coded_bits() const;  // payload_bits / rate; throws if not integral
};

BitVector conv_encode(std::span<const std::uint8_t> payload, const CodeConfig& cfg);

// Seeded pseudo-random permutation; depends only on (seed, length).
std::vector<int> interleaver_permutation(std::uint64_t seed, int length);
BitVector interleave_bits(std::span<const std::uint8_t> bits, std::uint64_t seed);
LlrVector interleave_llrs(const LlrVector& llrs, std::uint64_t seed);
LlrVector deinterleave_llrs(const LlrVector& llrs, std::uint64_t seed);

struct SisoResult {
  LlrVector extrinsic;        // per transmitted coded bit, clamped to +-kLlrMax
  LlrVector posterior;        // per transmitted coded bit, pre-clamp
  BitVector hard_payload;     // payload_bits decisions from the input-bit APPs
};

// BCJR (log-MAP) over the convolutional trellis. prior has coded_bits()
// entries in transmitted order (deinterleaved). extrinsic = posterior - prior
// per mother bit; repeated transmitted positions share their mother bit's
// extrinsic.
SisoResult siso_decode(const LlrVector& prior, const CodeConfig& cfg);

}  // namespace noma
