#pragma once

#include <span>
#include <vector>

#include "noma/factor_graph.hpp"
#include "noma/rng.hpp"
#include "noma/types.hpp"

namespace noma {

enum class ChannelModel {
  AwgnFixed,      // all coefficients 1
  BlockRayleigh,  // i.i.d. CN(0,1) per (user, antenna, RE), fixed per block
};

// Per-block channel: h[k][r][l] plus the noise variance per RE (total over
// real and imaginary parts).
struct ChannelRealization {
  std::vector<std::vector<std::vector<Complex>>> h;  // [user][antenna][re]
  double noise_var = 0.0;

  int num_users() const { return static_cast<int>(h.size()); }
  int num_antennas() const { return h.empty() ? 0 : static_cast<int>(h[0].size()); }
  int num_res() const { return h.empty() || h[0].empty() ? 0 : static_cast<int>(h[0][0].size()); }
};

// One L-RE channel use: y[r][l].
using ReceivedSignal = std::vector<std::vector<Complex>>;

ChannelRealization draw_channel(RngStream& rng, int num_users, int num_res, int num_antennas,
                                ChannelModel model, double noise_var);

// y_r = sum_k diag(h_{k,r}) x_k + w_r, w_r ~ CN(0, noise_var I).
ReceivedSignal transmit(std::span<const std::vector<Complex>> x, const ChannelRealization& ch,
                        RngStream& rng);

// Stacked per-RE view: y_l over antennas and the N_r x |F(l)| channel matrix,
// column c = user res_users[l][c], stored column-major.
struct ReView {
  std::vector<Complex> y;  // N_r
  std::vector<Complex> H;  // N_r * df, column-major
  int df = 0;
};

ReView per_re_view(const ReceivedSignal& y, const ChannelRealization& ch, const FactorGraph& g, int l);

}  // namespace noma
