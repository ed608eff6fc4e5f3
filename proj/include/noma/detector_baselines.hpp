#pragma once

#include <span>
#include <vector>

#include "noma/channel.hpp"
#include "noma/codebook.hpp"
#include "noma/detector_epa.hpp"
#include "noma/factor_graph.hpp"
#include "noma/types.hpp"

namespace noma {

// Per-user chip moments induced by decoder-feedback bit LLRs (uniform when
// absent). mean/var are full-length per RE, zero off support.
struct SoftSymbols {
  std::vector<std::vector<Complex>> mean;  // [user][re]
  std::vector<std::vector<double>> var;    // [user][re]
};

SoftSymbols soft_symbols_from_llrs(std::span<const LlrVector> llrs, std::span<const Codebook> cbs);

// Codeword-level MMSE with soft parallel interference cancellation: one chip
// MMSE pass per RE using the feedback moments as priors, extrinsic chip
// Gaussians per user, per-chip demap and LLR combining across the user's REs.
// With no feedback this is plain chip-level MMSE.
class MmsePicDetector {
 public:
  MmsePicDetector(const FactorGraph& graph, std::span<const Codebook> codebooks);

  // One L-RE channel use; prior_llrs may be empty (no feedback).
  std::vector<LlrVector> detect_group(const ReceivedSignal& y, const ChannelRealization& ch,
                                      std::span<const LlrVector> prior_llrs);

  BlockDetectResult detect_block(std::span<const ReceivedSignal> y, const ChannelRealization& ch,
                                 std::span<const LlrVector> prior_llrs);

 private:
  const FactorGraph& graph_;
  std::vector<Codebook> codebooks_;
};

// Exact joint posterior by enumeration over all codeword tuples; test and
// reference oracle. Throws if M^K exceeds 1e6 tuples.
std::vector<SymbolPosterior> exact_map_detect(const ReceivedSignal& y, const ChannelRealization& ch,
                                              const FactorGraph& graph,
                                              std::span<const Codebook> codebooks,
                                              const PriorTable& priors, double noise_var);

}  // namespace noma
