#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noma/channel.hpp"
#include "noma/codebook.hpp"
#include "noma/factor_graph.hpp"
#include "noma/rng.hpp"

using namespace noma;

TEST_CASE("awgn-fixed channel is all ones") {
  RngStream rng(1, 0, StreamPurpose::Channel);
  const auto ch = draw_channel(rng, 3, 4, 2, ChannelModel::AwgnFixed, 0.1);
  for (const auto& per_user : ch.h) {
    for (const auto& per_ant : per_user) {
      for (const Complex& v : per_ant) CHECK(v == Complex{1.0, 0.0});
    }
  }
  CHECK(ch.noise_var == 0.1);
}

TEST_CASE("block-rayleigh coefficients have unit mean power") {
  RngStream rng(2, 0, StreamPurpose::Channel);
  double acc = 0.0;
  long long n = 0;
  for (int rep = 0; rep < 7000; ++rep) {
    const auto ch = draw_channel(rng, 2, 4, 2, ChannelModel::BlockRayleigh, 0.0);
    for (const auto& per_user : ch.h) {
      for (const auto& per_ant : per_user) {
        for (const Complex& v : per_ant) {
          acc += std::norm(v);
          ++n;
        }
      }
    }
  }
  CHECK(n >= 100000);
  CHECK(acc / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("channel draw is reproducible per stream key") {
  RngStream a(9, 3, StreamPurpose::Channel);
  RngStream b(9, 3, StreamPurpose::Channel);
  const auto ca = draw_channel(a, 4, 4, 2, ChannelModel::BlockRayleigh, 0.0);
  const auto cb = draw_channel(b, 4, 4, 2, ChannelModel::BlockRayleigh, 0.0);
  CHECK(ca.h == cb.h);
}

TEST_CASE("transmit: noiseless identity and superposition") {
  RngStream rng(3, 0, StreamPurpose::Noise);
  {
    ChannelRealization ch;
    ch.noise_var = 0.0;
    ch.h = {{{Complex{1.0, 0.0}}}};
    const std::vector<std::vector<Complex>> x{{Complex{1.0, 0.0}}};
    const auto y = transmit(x, ch, rng);
    CHECK(y[0][0] == Complex{1.0, 0.0});
  }
  {
    ChannelRealization ch;
    ch.noise_var = 0.0;
    ch.h = {{{Complex{1.0, 0.0}}}, {{Complex{0.0, 1.0}}}};
    const std::vector<std::vector<Complex>> x{{Complex{1.0, 0.0}}, {Complex{1.0, 0.0}}};
    const auto y = transmit(x, ch, rng);
    CHECK(std::abs(y[0][0] - Complex{1.0, 1.0}) < 1e-15);
  }
}

TEST_CASE("transmit: empirical noise variance tracks the configured value") {
  RngStream noise_rng(4, 0, StreamPurpose::Noise);
  ChannelRealization ch;
  const double noise_var = 0.37;
  ch.noise_var = noise_var;
  ch.h = {{{Complex{1.0, 0.0}}}};
  const std::vector<std::vector<Complex>> x{{Complex{0.5, -0.25}}};
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto y = transmit(x, ch, noise_rng);
    acc += std::norm(y[0][0] - x[0][0]);
  }
  CHECK(acc / n == doctest::Approx(noise_var).epsilon(0.02));
}

TEST_CASE("transmit is linear at zero noise") {
  RngStream rng(5, 0, StreamPurpose::Channel);
  RngStream noise(5, 0, StreamPurpose::Noise);
  const auto ch = draw_channel(rng, 3, 4, 2, ChannelModel::BlockRayleigh, 0.0);
  std::vector<std::vector<Complex>> xa(3, std::vector<Complex>(4)), xb = xa, xs = xa;
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 4; ++l) {
      xa[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = rng.next_cgauss(1.0);
      xb[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = rng.next_cgauss(1.0);
      xs[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
          xa[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] +
          xb[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
    }
  }
  const auto ya = transmit(xa, ch, noise);
  const auto yb = transmit(xb, ch, noise);
  const auto ys = transmit(xs, ch, noise);
  for (int r = 0; r < 2; ++r) {
    for (int l = 0; l < 4; ++l) {
      CHECK(std::abs(ys[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] -
                     ya[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)] -
                     yb[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)]) < 1e-12);
    }
  }
}

TEST_CASE("per-RE view: single-entry case and stable ordering") {
  std::vector<Codebook> cbs;
  for (int k = 0; k < 3; ++k) cbs.push_back(build_spread_codebook(build_qam(4), fds_signature(k), k));
  const FactorGraph g = build_factor_graph(cbs);
  RngStream rng(6, 0, StreamPurpose::Channel);
  const auto ch = draw_channel(rng, 3, 4, 2, ChannelModel::BlockRayleigh, 0.0);
  ReceivedSignal y(2, std::vector<Complex>(4, Complex{0.0, 0.0}));

  const ReView v0 = per_re_view(y, ch, g, 2);
  const ReView v1 = per_re_view(y, ch, g, 2);
  CHECK(v0.H == v1.H);
  CHECK(v0.df == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    for (int r = 0; r < 2; ++r) {
      CHECK(v0.H[c * 2 + static_cast<std::size_t>(r)] == ch.h[c][static_cast<std::size_t>(r)][2]);
    }
  }

  // Single user on a lone RE.
  std::vector<Codebook> one{build_spread_codebook(build_qam(2), std::vector<Complex>{Complex{1.0, 0.0}}, 0)};
  const FactorGraph g1 = build_factor_graph(one);
  RngStream rng1(7, 0, StreamPurpose::Channel);
  const auto ch1 = draw_channel(rng1, 1, 1, 1, ChannelModel::BlockRayleigh, 0.0);
  ReceivedSignal y1(1, std::vector<Complex>(1));
  const ReView w = per_re_view(y1, ch1, g1, 0);
  CHECK(w.df == 1);
  CHECK(w.H.size() == 1);
  CHECK(w.H[0] == ch1.h[0][0][0]);
}

TEST_CASE("per-RE views reconstruct the noiseless signal") {
  std::vector<Codebook> cbs;
  for (int k = 0; k < 4; ++k) cbs.push_back(build_spread_codebook(build_qam(4), fds_signature(k), k));
  const FactorGraph g = build_factor_graph(cbs);
  RngStream rng(8, 0, StreamPurpose::Channel);
  RngStream noise(8, 0, StreamPurpose::Noise);
  const auto ch = draw_channel(rng, 4, 4, 2, ChannelModel::BlockRayleigh, 0.0);
  std::vector<std::vector<Complex>> x;
  for (int k = 0; k < 4; ++k) {
    x.push_back(cbs[static_cast<std::size_t>(k)].codewords[static_cast<std::size_t>(k % 4)]);
  }
  const auto y = transmit(x, ch, noise);
  for (int l = 0; l < 4; ++l) {
    const ReView view = per_re_view(y, ch, g, l);
    for (int r = 0; r < 2; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t c = 0; c < static_cast<std::size_t>(view.df); ++c) {
        const int k = g.res_users[static_cast<std::size_t>(l)][c];
        acc += view.H[c * 2 + static_cast<std::size_t>(r)] *
               x[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      }
      CHECK(std::abs(acc - view.y[static_cast<std::size_t>(r)]) < 1e-12);
    }
  }
}
