#include "noma/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noma/detector_baselines.hpp"

namespace noma {

std::vector<std::vector<Complex>> map_block(std::span<const std::uint8_t> tx_bits, const Codebook& cb) {
  const int bits = cb.bits_per_symbol();
  if (tx_bits.size() % static_cast<std::size_t>(bits) != 0) {
    throw std::invalid_argument("map_block: coded length not divisible by bits per symbol");
  }
  const std::size_t groups = tx_bits.size() / static_cast<std::size_t>(bits);
  std::vector<std::vector<Complex>> out(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    out[g] = map_bits(tx_bits.subspan(g * static_cast<std::size_t>(bits), static_cast<std::size_t>(bits)), cb);
  }
  return out;
}

namespace {

// Exact-MAP marginals per group, wrapped as a block detector for the turbo
// loop (reference receiver at enumeration scale).
BlockDetectResult map_detect_block(std::span<const ReceivedSignal> y, const ChannelRealization& ch,
                                   const FactorGraph& graph, std::span<const Codebook> cbs,
                                   std::span<const LlrVector> prior_llrs) {
  const int num_users = graph.num_users;
  BlockDetectResult out;
  out.extrinsic.resize(static_cast<std::size_t>(num_users));
  std::vector<LlrVector> group_llrs(static_cast<std::size_t>(num_users));
  for (std::size_t g = 0; g < y.size(); ++g) {
    for (int k = 0; k < num_users; ++k) {
      const int bits = cbs[static_cast<std::size_t>(k)].bits_per_symbol();
      auto& lam = group_llrs[static_cast<std::size_t>(k)];
      lam.assign(static_cast<std::size_t>(bits), 0.0);
      if (!prior_llrs.empty() && !prior_llrs[static_cast<std::size_t>(k)].empty()) {
        for (int j = 0; j < bits; ++j) {
          lam[static_cast<std::size_t>(j)] =
              prior_llrs[static_cast<std::size_t>(k)][g * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)];
        }
      }
    }
    const PriorTable priors = prior_from_llrs(group_llrs, cbs);
    const auto marginals = exact_map_detect(y[g], ch, graph, cbs, priors, ch.noise_var);
    for (int k = 0; k < num_users; ++k) {
      const auto lam = extrinsic_llrs(marginals[static_cast<std::size_t>(k)],
                                      group_llrs[static_cast<std::size_t>(k)],
                                      cbs[static_cast<std::size_t>(k)]);
      auto& dst = out.extrinsic[static_cast<std::size_t>(k)];
      dst.insert(dst.end(), lam.begin(), lam.end());
    }
  }
  return out;
}

}  // namespace

std::vector<UserDecodeResult> turbo_receive(std::span<const ReceivedSignal> y,
                                            const ChannelRealization& ch,
                                            const FactorGraph& graph,
                                            std::span<const Codebook> codebooks,
                                            std::span<const CodeConfig> code_cfgs,
                                            const ReceiverConfig& cfg, TurboStats* stats,
                                            TurboTrace* trace) {
  const int num_users = graph.num_users;
  if (static_cast<int>(codebooks.size()) != num_users ||
      static_cast<int>(code_cfgs.size()) != num_users) {
    throw std::invalid_argument("turbo_receive: per-user argument sizes disagree");
  }

  std::vector<UserDecodeResult> results(static_cast<std::size_t>(num_users));
  for (auto& r : results) r.iterations_used = cfg.t_outer;

  // Working copy of the received block; hard-PIC subtracts into it.
  std::vector<ReceivedSignal> yres(y.begin(), y.end());

  std::vector<int> active;                 // users still in the detector graph
  for (int k = 0; k < num_users; ++k) active.push_back(k);
  std::vector<char> decoded(static_cast<std::size_t>(num_users), 0);
  std::vector<LlrVector> det_priors(static_cast<std::size_t>(num_users));  // interleaved domain

  TurboStats local_stats;
  TurboStats& st = stats ? *stats : local_stats;
  st = TurboStats{};

  for (int round = 1; round <= cfg.t_outer; ++round) {
    // Stop as soon as every CRC has passed; no further detector calls.
    bool all_done = true;
    for (int k : active) {
      if (!decoded[static_cast<std::size_t>(k)]) all_done = false;
    }
    if (active.empty() || all_done) break;

    std::vector<Codebook> sub_cbs;
    std::vector<LlrVector> sub_priors;
    for (int k : active) {
      sub_cbs.push_back(codebooks[static_cast<std::size_t>(k)]);
      sub_priors.push_back(det_priors[static_cast<std::size_t>(k)]);
    }
    // Channel view restricted to the active users.
    ChannelRealization sub_ch;
    sub_ch.noise_var = ch.noise_var;
    for (int k : active) sub_ch.h.push_back(ch.h[static_cast<std::size_t>(k)]);
    const FactorGraph sub_graph = build_factor_graph(sub_cbs);

    BlockDetectResult det;
    switch (cfg.detector) {
      case DetectorKind::Epa: {
        EpaDetector detector(sub_graph, sub_cbs, EpaConfig{cfg.t_inner, cfg.damping});
        det = detector.detect_block(yres, sub_ch, sub_priors);
        break;
      }
      case DetectorKind::MmsePic: {
        MmsePicDetector detector(sub_graph, sub_cbs);
        det = detector.detect_block(yres, sub_ch, sub_priors);
        break;
      }
      case DetectorKind::ExactMap:
        det = map_detect_block(yres, sub_ch, sub_graph, sub_cbs, sub_priors);
        break;
    }
    ++st.detector_calls;

    TurboTrace::Round* tr = nullptr;
    if (trace) {
      trace->rounds.emplace_back();
      tr = &trace->rounds.back();
      tr->users = active;
      tr->detector_extrinsic = det.extrinsic;
    }

    std::vector<int> newly_decoded;
    for (std::size_t u = 0; u < active.size(); ++u) {
      const int k = active[u];
      if (decoded[static_cast<std::size_t>(k)]) {
        if (tr) {
          tr->decoder_prior.emplace_back();
          tr->decoder_extrinsic.emplace_back();
          tr->next_detector_prior.push_back(det_priors[static_cast<std::size_t>(k)]);
        }
        continue;
      }
      const CodeConfig& cc = code_cfgs[static_cast<std::size_t>(k)];
      const LlrVector dec_prior = deinterleave_llrs(det.extrinsic[u], cc.interleaver_seed);
      const SisoResult siso = siso_decode(dec_prior, cc);
      ++st.decode_calls;

      if (crc16_check(siso.hard_payload)) {
        auto& res = results[static_cast<std::size_t>(k)];
        res.crc_ok = true;
        res.iterations_used = round;
        res.payload.assign(siso.hard_payload.begin(), siso.hard_payload.end() - 16);
        decoded[static_cast<std::size_t>(k)] = 1;
        newly_decoded.push_back(k);
        // Saturated priors keep helping the remaining users when the user is
        // not removed from the graph.
        const BitVector reenc = conv_encode(siso.hard_payload, cc);
        const BitVector tx_bits = interleave_bits(reenc, cc.interleaver_seed);
        LlrVector sat(tx_bits.size());
        for (std::size_t i = 0; i < tx_bits.size(); ++i) sat[i] = tx_bits[i] ? -kLlrMax : kLlrMax;
        det_priors[static_cast<std::size_t>(k)] = std::move(sat);
      } else {
        det_priors[static_cast<std::size_t>(k)] = interleave_llrs(siso.extrinsic, cc.interleaver_seed);
      }
      if (tr) {
        tr->decoder_prior.push_back(dec_prior);
        tr->decoder_extrinsic.push_back(siso.extrinsic);
        tr->next_detector_prior.push_back(det_priors[static_cast<std::size_t>(k)]);
      }
    }

    if (cfg.hard_pic && !newly_decoded.empty()) {
      // Hard PIC: rebuild each verified codeword, subtract its contribution,
      // and drop the user from the active graph.
      for (int k : newly_decoded) {
        const CodeConfig& cc = code_cfgs[static_cast<std::size_t>(k)];
        const BitVector with_crc = crc16_attach(results[static_cast<std::size_t>(k)].payload);
        const BitVector reenc = conv_encode(with_crc, cc);
        const BitVector tx_bits = interleave_bits(reenc, cc.interleaver_seed);
        const auto symbols = map_block(tx_bits, codebooks[static_cast<std::size_t>(k)]);
        const auto& hk = ch.h[static_cast<std::size_t>(k)];
        for (std::size_t g = 0; g < yres.size(); ++g) {
          for (std::size_t r = 0; r < hk.size(); ++r) {
            for (std::size_t l = 0; l < hk[r].size(); ++l) {
              yres[g][r][l] -= hk[r][l] * symbols[g][l];
            }
          }
        }
        active.erase(std::remove(active.begin(), active.end(), k), active.end());
      }
    }
  }

  for (const auto& group : yres) {
    for (const auto& ant : group) {
      for (const Complex& v : ant) st.residual_energy += std::norm(v);
    }
  }
  return results;
}

}  // namespace noma
