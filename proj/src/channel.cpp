#include "noma/channel.hpp"

namespace noma {

ChannelRealization draw_channel(RngStream& rng, int num_users, int num_res, int num_antennas,
                                ChannelModel model, double noise_var) {
  ChannelRealization ch;
  ch.noise_var = noise_var;
  ch.h.assign(static_cast<std::size_t>(num_users),
              std::vector<std::vector<Complex>>(
                  static_cast<std::size_t>(num_antennas),
                  std::vector<Complex>(static_cast<std::size_t>(num_res), Complex{1.0, 0.0})));
  if (model == ChannelModel::BlockRayleigh) {
    for (auto& per_user : ch.h) {
      for (auto& per_ant : per_user) {
        for (auto& coeff : per_ant) coeff = rng.next_cgauss(1.0);
      }
    }
  }
  return ch;
}

ReceivedSignal transmit(std::span<const std::vector<Complex>> x, const ChannelRealization& ch,
                        RngStream& rng) {
  const int num_res = ch.num_res();
  const int num_ant = ch.num_antennas();
  ReceivedSignal y(static_cast<std::size_t>(num_ant),
                   std::vector<Complex>(static_cast<std::size_t>(num_res), Complex{0.0, 0.0}));
  for (int r = 0; r < num_ant; ++r) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto& hk = ch.h[k][static_cast<std::size_t>(r)];
      for (int l = 0; l < num_res; ++l) {
        y[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] +=
            hk[static_cast<std::size_t>(l)] * x[k][static_cast<std::size_t>(l)];
      }
    }
    if (ch.noise_var > 0.0) {
      for (int l = 0; l < num_res; ++l) {
        y[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] += rng.next_cgauss(ch.noise_var);
      }
    }
  }
  return y;
}

ReView per_re_view(const ReceivedSignal& y, const ChannelRealization& ch, const FactorGraph& g, int l) {
  const int num_ant = ch.num_antennas();
  const auto& users = g.res_users[static_cast<std::size_t>(l)];
  ReView view;
  view.df = static_cast<int>(users.size());
  view.y.resize(static_cast<std::size_t>(num_ant));
  for (int r = 0; r < num_ant; ++r) {
    view.y[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)];
  }
  view.H.resize(static_cast<std::size_t>(num_ant) * users.size());
  for (std::size_t c = 0; c < users.size(); ++c) {
    for (int r = 0; r < num_ant; ++r) {
      view.H[c * static_cast<std::size_t>(num_ant) + static_cast<std::size_t>(r)] =
          ch.h[static_cast<std::size_t>(users[c])][static_cast<std::size_t>(r)][static_cast<std::size_t>(l)];
    }
  }
  return view;
}

}  // namespace noma
