#include "noma/detector_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noma {

SoftSymbols soft_symbols_from_llrs(std::span<const LlrVector> llrs, std::span<const Codebook> cbs) {
  const PriorTable table = prior_from_llrs(llrs, cbs);
  SoftSymbols soft;
  soft.mean.resize(cbs.size());
  soft.var.resize(cbs.size());
  for (std::size_t k = 0; k < cbs.size(); ++k) {
    const Codebook& cb = cbs[k];
    soft.mean[k].assign(static_cast<std::size_t>(cb.num_res), Complex{0.0, 0.0});
    soft.var[k].assign(static_cast<std::size_t>(cb.num_res), 0.0);
    for (int l : cb.support) {
      const GaussianMessage m = vn_project(table[k], cb, l);
      soft.mean[k][static_cast<std::size_t>(l)] = m.mean;
      soft.var[k][static_cast<std::size_t>(l)] = m.variance();
    }
  }
  return soft;
}

MmsePicDetector::MmsePicDetector(const FactorGraph& graph, std::span<const Codebook> codebooks)
    : graph_(graph), codebooks_(codebooks.begin(), codebooks.end()) {}

std::vector<LlrVector> MmsePicDetector::detect_group(const ReceivedSignal& y,
                                                     const ChannelRealization& ch,
                                                     std::span<const LlrVector> prior_llrs) {
  const int num_users = graph_.num_users;
  const int nr = ch.num_antennas();
  const SoftSymbols soft = soft_symbols_from_llrs(prior_llrs, codebooks_);

  // Extrinsic chip message per (user, RE-slot); aligned with V(k) order.
  std::vector<std::vector<GaussianMessage>> chip_msgs(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    chip_msgs[static_cast<std::size_t>(k)].resize(graph_.user_res[static_cast<std::size_t>(k)].size());
  }

  std::vector<GaussianMessage> priors;
  for (int l = 0; l < graph_.num_res; ++l) {
    const auto& users = graph_.res_users[static_cast<std::size_t>(l)];
    const ReView view = per_re_view(y, ch, graph_, l);
    priors.resize(users.size());
    for (std::size_t c = 0; c < users.size(); ++c) {
      const auto k = static_cast<std::size_t>(users[c]);
      priors[c] = GaussianMessage::from_moments(soft.mean[k][static_cast<std::size_t>(l)],
                                                std::max(soft.var[k][static_cast<std::size_t>(l)], kVarFloor));
    }
    const auto post = fn_mmse_update(priors, view.y, view.H, nr, ch.noise_var);
    for (std::size_t c = 0; c < users.size(); ++c) {
      const auto k = static_cast<std::size_t>(users[c]);
      const auto& vk = graph_.user_res[k];
      const auto slot = static_cast<std::size_t>(
          std::find(vk.begin(), vk.end(), l) - vk.begin());
      chip_msgs[k][slot] = gaussian_divide(post[c], priors[c]);
    }
  }

  // Per-chip demap (prior-free, so the sum over chips is already extrinsic),
  // combined across the user's REs by LLR addition.
  std::vector<LlrVector> out(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    const Codebook& cb = codebooks_[static_cast<std::size_t>(k)];
    const int bits = cb.bits_per_symbol();
    const int order = cb.order();
    LlrVector llr(static_cast<std::size_t>(bits), 0.0);
    const auto& vk = graph_.user_res[static_cast<std::size_t>(k)];
    std::vector<double> w(static_cast<std::size_t>(order));
    for (std::size_t slot = 0; slot < vk.size(); ++slot) {
      const GaussianMessage& msg = chip_msgs[static_cast<std::size_t>(k)][slot];
      if (!(msg.precision > 0.0)) continue;
      const int l = vk[slot];
      double peak = -1e300;
      for (int m = 0; m < order; ++m) {
        const double lw = -msg.precision *
                          std::norm(cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)] -
                                    msg.mean);
        w[static_cast<std::size_t>(m)] = lw;
        peak = std::max(peak, lw);
      }
      for (int j = 0; j < bits; ++j) {
        double mass0 = 0.0, mass1 = 0.0;
        for (int m = 0; m < order; ++m) {
          const double e = std::exp(w[static_cast<std::size_t>(m)] - peak);
          if ((m >> (bits - 1 - j)) & 1) {
            mass1 += e;
          } else {
            mass0 += e;
          }
        }
        llr[static_cast<std::size_t>(j)] += std::log(mass0) - std::log(mass1);
      }
    }
    for (auto& v : llr) v = std::clamp(v, -kLlrMax, kLlrMax);
    out[static_cast<std::size_t>(k)] = std::move(llr);
  }
  return out;
}

BlockDetectResult MmsePicDetector::detect_block(std::span<const ReceivedSignal> y,
                                                const ChannelRealization& ch,
                                                std::span<const LlrVector> prior_llrs) {
  const int num_users = graph_.num_users;
  BlockDetectResult out;
  out.extrinsic.resize(static_cast<std::size_t>(num_users));
  std::vector<LlrVector> group_llrs(static_cast<std::size_t>(num_users));
  for (std::size_t g = 0; g < y.size(); ++g) {
    bool any = false;
    for (int k = 0; k < num_users; ++k) {
      const int bits = codebooks_[static_cast<std::size_t>(k)].bits_per_symbol();
      auto& lam = group_llrs[static_cast<std::size_t>(k)];
      lam.assign(static_cast<std::size_t>(bits), 0.0);
      if (!prior_llrs.empty() && !prior_llrs[static_cast<std::size_t>(k)].empty()) {
        any = true;
        for (int j = 0; j < bits; ++j) {
          lam[static_cast<std::size_t>(j)] =
              prior_llrs[static_cast<std::size_t>(k)][g * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)];
        }
      }
    }
    const auto group_out =
        detect_group(y[g], ch, any ? std::span<const LlrVector>(group_llrs) : std::span<const LlrVector>{});
    for (int k = 0; k < num_users; ++k) {
      auto& dst = out.extrinsic[static_cast<std::size_t>(k)];
      dst.insert(dst.end(), group_out[static_cast<std::size_t>(k)].begin(),
                 group_out[static_cast<std::size_t>(k)].end());
    }
  }
  return out;
}

std::vector<SymbolPosterior> exact_map_detect(const ReceivedSignal& y, const ChannelRealization& ch,
                                              const FactorGraph& graph,
                                              std::span<const Codebook> codebooks,
                                              const PriorTable& priors, double noise_var) {
  const int num_users = graph.num_users;
  double tuples = 1.0;
  for (const Codebook& cb : codebooks) tuples *= cb.order();
  if (tuples > 1e6) {
    throw std::invalid_argument("exact_map_detect: enumeration budget exceeded, M^K = " +
                                std::to_string(tuples));
  }
  const int nr = ch.num_antennas();
  const int num_res = ch.num_res();
  const double nv = std::max(noise_var, 1e-12);  // keeps the noiseless limit well defined

  std::vector<int> labels(static_cast<std::size_t>(num_users), 0);
  std::vector<SymbolPosterior> marginal(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    marginal[static_cast<std::size_t>(k)].assign(
        static_cast<std::size_t>(codebooks[static_cast<std::size_t>(k)].order()), 0.0);
  }

  const auto total = static_cast<long long>(tuples);
  std::vector<double> logw(static_cast<std::size_t>(total));
  double peak = -1e300;
  std::vector<Complex> sum(static_cast<std::size_t>(nr));
  for (long long t = 0; t < total; ++t) {
    long long idx = t;
    for (int k = 0; k < num_users; ++k) {
      const int order = codebooks[static_cast<std::size_t>(k)].order();
      labels[static_cast<std::size_t>(k)] = static_cast<int>(idx % order);
      idx /= order;
    }
    double lw = 0.0;
    for (int k = 0; k < num_users; ++k) {
      lw += std::log(priors[static_cast<std::size_t>(k)][static_cast<std::size_t>(labels[static_cast<std::size_t>(k)])]);
    }
    for (int l = 0; l < num_res; ++l) {
      for (int r = 0; r < nr; ++r) sum[static_cast<std::size_t>(r)] = Complex{0.0, 0.0};
      for (int k = 0; k < num_users; ++k) {
        const Complex x =
            codebooks[static_cast<std::size_t>(k)]
                .codewords[static_cast<std::size_t>(labels[static_cast<std::size_t>(k)])][static_cast<std::size_t>(l)];
        if (x == Complex{0.0, 0.0}) continue;
        for (int r = 0; r < nr; ++r) {
          sum[static_cast<std::size_t>(r)] +=
              ch.h[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] * x;
        }
      }
      for (int r = 0; r < nr; ++r) {
        lw -= std::norm(y[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] - sum[static_cast<std::size_t>(r)]) / nv;
      }
    }
    logw[static_cast<std::size_t>(t)] = lw;
    peak = std::max(peak, lw);
  }

  double total_mass = 0.0;
  for (long long t = 0; t < total; ++t) {
    const double w = std::exp(logw[static_cast<std::size_t>(t)] - peak);
    total_mass += w;
    long long idx = t;
    for (int k = 0; k < num_users; ++k) {
      const int order = codebooks[static_cast<std::size_t>(k)].order();
      marginal[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx % order)] += w;
      idx /= order;
    }
  }
  for (auto& row : marginal) {
    for (auto& p : row) p /= total_mass;
  }
  return marginal;
}

}  // namespace noma
