#pragma once

#include <span>
#include <vector>

#include "noma/channel.hpp"
#include "noma/codebook.hpp"
#include "noma/detector_epa.hpp"
#include "noma/factor_graph.hpp"
#include "noma/fec.hpp"
#include "noma/types.hpp"

namespace noma {

enum class DetectorKind { Epa, MmsePic, ExactMap };

struct ReceiverConfig {
  DetectorKind detector = DetectorKind::Epa;
  int t_outer = 3;
  int t_inner = 3;
  bool hard_pic = true;  // subtract CRC-verified users and shrink the graph
  double damping = 1.0;
};

struct UserDecodeResult {
  BitVector payload;        // information bits (CRC stripped)
  bool crc_ok = false;
  int iterations_used = 0;  // outer round at which the CRC passed, else t_outer
};

struct TurboStats {
  int detector_calls = 0;
  int decode_calls = 0;
  double residual_energy = 0.0;  // energy left in y' after the last round
};

// Test hook: records the LLR flows of every round so extrinsic discipline can
// be asserted from outside.
struct TurboTrace {
  struct Round {
    std::vector<int> users;                         // global ids, detector order
    std::vector<LlrVector> detector_extrinsic;      // interleaved domain
    std::vector<LlrVector> decoder_prior;           // deinterleaved
    std::vector<LlrVector> decoder_extrinsic;       // deinterleaved
    std::vector<LlrVector> next_detector_prior;     // interleaved domain
  };
  std::vector<Round> rounds;
};

// Turbo loop: detector -> per-user SISO decode -> decoder extrinsics as the
// next detector priors, with hybrid interference cancellation (soft via the
// exchanged LLRs, hard via CRC-gated reconstruction and subtraction).
std::vector<UserDecodeResult> turbo_receive(std::span<const ReceivedSignal> y,
                                            const ChannelRealization& ch,
                                            const FactorGraph& graph,
                                            std::span<const Codebook> codebooks,
                                            std::span<const CodeConfig> code_cfgs,
                                            const ReceiverConfig& cfg, TurboStats* stats = nullptr,
                                            TurboTrace* trace = nullptr);

// Symbol groups for one user's block: interleaved coded bits mapped J at a
// time. Shared by the transmitter path and the hard-PIC reconstruction.
std::vector<std::vector<Complex>> map_block(std::span<const std::uint8_t> tx_bits, const Codebook& cb);

}  // namespace noma
