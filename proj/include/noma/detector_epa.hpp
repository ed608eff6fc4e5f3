#pragma once

#include <span>
#include <vector>

#include "noma/channel.hpp"
#include "noma/codebook.hpp"
#include "noma/factor_graph.hpp"
#include "noma/gaussian.hpp"
#include "noma/types.hpp"

namespace noma {

// Per-user codeword priors from decoder-feedback LLRs: P0(alpha) is the
// product of the per-bit probabilities under the label of alpha. An empty
// span (or an empty per-user vector) yields uniform rows.
PriorTable prior_from_llrs(std::span<const LlrVector> llrs, std::span<const Codebook> cbs);

// Discrete posterior over one user's codebook given its prior row and the
// incoming channel messages (one per support RE, aligned with cb.support).
// Evaluated in the log domain with max-subtraction.
SymbolPosterior vn_posterior(const std::vector<double>& prior, const Codebook& cb,
                             std::span<const GaussianMessage> messages);

// Gaussian moment-matching projection of the chip distribution at RE l.
// A degenerate posterior gets variance kVarFloor.
GaussianMessage vn_project(const SymbolPosterior& posterior, const Codebook& cb, int l);

// Chip-by-chip linear MMSE at one RE: priors are per-column Gaussian beliefs
// (non-informative treated as variance kVarCap), H is N_r x df column-major.
// Returns per-column posterior mean/variance; the inverted matrix is
// N_r x N_r, with 1e-12 diagonal jitter if the factorization fails.
std::vector<GaussianMessage> fn_mmse_update(std::span<const GaussianMessage> priors,
                                            std::span<const Complex> y, std::span<const Complex> H,
                                            int num_antennas, double noise_var);

// Extrinsic bit LLRs from a symbol posterior: log-ratio of bit-0 mass over
// bit-1 mass minus the prior LLR, clamped to +-kLlrMax.
LlrVector extrinsic_llrs(const SymbolPosterior& posterior, const LlrVector& prior_llrs,
                         const Codebook& cb);

struct EpaConfig {
  int t_inner = 3;
  double damping = 1.0;  // blend factor on new FN->VN natural parameters
};

struct GroupDetectResult {
  std::vector<SymbolPosterior> posteriors;  // per user
  std::vector<LlrVector> extrinsic;         // per user, J entries
};

struct BlockDetectResult {
  std::vector<LlrVector> extrinsic;  // per user, groups * J entries
};

// Iterative Gaussian message-passing detector on the user/RE factor graph:
// per inner iteration all variable nodes project their discrete beliefs to
// extrinsic chip Gaussians, then every RE runs the chip MMSE update and sends
// extrinsic Gaussians back. Workspace is reused across calls, so one instance
// should be kept per (graph, codebooks) pair.
class EpaDetector {
 public:
  EpaDetector(const FactorGraph& graph, std::span<const Codebook> codebooks, EpaConfig cfg);

  // One L-RE channel use. prior_llrs holds J entries per user (may be empty
  // together with a uniform prior table).
  GroupDetectResult detect_group(const ReceivedSignal& y, const ChannelRealization& ch,
                                 const PriorTable& priors, std::span<const LlrVector> prior_llrs);

  // A block of channel uses sharing one channel realization. prior_llrs holds
  // y.size()*J entries per user, or is empty for uniform priors.
  BlockDetectResult detect_block(std::span<const ReceivedSignal> y, const ChannelRealization& ch,
                                 std::span<const LlrVector> prior_llrs);

 private:
  void run_group(const ReceivedSignal& y, const ChannelRealization& ch, const PriorTable& priors,
                 std::span<const LlrVector> prior_llrs, GroupDetectResult& out);
  void compute_posterior(int k, const std::vector<double>& prior_row, SymbolPosterior& out);

  const FactorGraph& graph_;
  std::vector<Codebook> codebooks_;
  EpaConfig cfg_;

  // Edges laid out contiguously per RE; user_edges_ lists each user's edge
  // ids in V(k) order.
  std::vector<int> res_edge_offset_;
  std::vector<std::vector<int>> user_edges_;
  int num_edges_ = 0;
  int max_order_ = 0;

  std::vector<std::vector<Complex>> edge_chips_;  // [edge][label]
  std::vector<GaussianMessage> fn_to_vn_;
  std::vector<GaussianMessage> vn_to_fn_;

  // scratch reused across groups
  std::vector<double> logw_;
  std::vector<Complex> ws_h_;
  std::vector<Complex> ws_y_;
  std::vector<Complex> ws_gram_;
  std::vector<Complex> ws_resid_;
  std::vector<Complex> ws_col_;
};

}  // namespace noma
