#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noma/codebook.hpp"
#include "noma/factor_graph.hpp"
#include "noma/gaussian.hpp"
#include "noma/rng.hpp"

using namespace noma;

TEST_CASE("factor graph: single dense node") {
  const std::vector<Complex> seq{Complex{1.0, 0.0}};
  std::vector<Codebook> cbs{build_spread_codebook(build_qam(2), seq, 0)};
  const FactorGraph g = build_factor_graph(cbs);
  CHECK(g.num_users == 1);
  CHECK(g.num_res == 1);
  REQUIRE(g.res_users.size() == 1);
  CHECK(g.res_users[0] == std::vector<int>{0});
  CHECK(g.user_res[0] == std::vector<int>{0});
  CHECK(g.df_max == 1);
  CHECK(factor_graph_consistent(g));
}

TEST_CASE("factor graph: fully connected dense graph for spread users") {
  std::vector<Codebook> cbs;
  for (int k = 0; k < 6; ++k) cbs.push_back(build_spread_codebook(build_qam(4), fds_signature(k), k));
  const FactorGraph g = build_factor_graph(cbs);
  CHECK(g.num_res == 4);
  CHECK(g.df_max == 6);
  for (int l = 0; l < 4; ++l) {
    CHECK(g.res_users[static_cast<std::size_t>(l)] == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
  CHECK(factor_graph_consistent(g));
}

TEST_CASE("factor graph: disjoint supports give a tree") {
  const Constellation c = build_qam(2);
  std::vector<Codebook> cbs;
  cbs.push_back(build_sparse_codebook(c, 2, {0}, std::vector<Complex>{Complex{1.0, 0.0}}, 0));
  cbs.push_back(build_sparse_codebook(c, 2, {1}, std::vector<Complex>{Complex{1.0, 0.0}}, 1));
  const FactorGraph g = build_factor_graph(cbs);
  CHECK(g.res_users[0] == std::vector<int>{0});
  CHECK(g.res_users[1] == std::vector<int>{1});
  CHECK(g.df_max == 1);
  CHECK(factor_graph_consistent(g));
}

TEST_CASE("factor graph: consistency holds for random sparse constructions") {
  RngStream rng(7, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 50; ++rep) {
    const int L = 2 + static_cast<int>(rng.next_below(5));
    const int K = 1 + static_cast<int>(rng.next_below(6));
    std::vector<Codebook> cbs;
    for (int k = 0; k < K; ++k) {
      const int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(L)));
      std::vector<int> mask;
      for (int l = 0; l < L && static_cast<int>(mask.size()) < m; ++l) {
        if (rng.next_bit() || L - l == m - static_cast<int>(mask.size())) mask.push_back(l);
      }
      std::vector<Complex> vals(mask.size(), Complex{1.0 / std::sqrt(static_cast<double>(mask.size())), 0.0});
      cbs.push_back(build_sparse_codebook(build_qam(2), L, mask, vals, k));
    }
    CHECK(factor_graph_consistent(build_factor_graph(cbs)));
  }
}

TEST_CASE("factor graph: empty support is rejected with the user named") {
  Codebook cb;
  cb.user_id = 3;
  cb.num_res = 2;
  cb.codewords = {{Complex{0, 0}, Complex{0, 0}}, {Complex{0, 0}, Complex{0, 0}}};
  std::vector<Codebook> cbs{cb};
  CHECK_THROWS_WITH_AS(build_factor_graph(cbs), doctest::Contains("user 3"), std::invalid_argument);
}

TEST_CASE("gaussian product: non-informative operand is the identity") {
  const auto a = GaussianMessage::non_informative();
  const auto b = GaussianMessage::from_moments(Complex{0.3, 0.0}, 0.5);
  const auto p = gaussian_product(a, b);
  CHECK(p.mean.real() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p.variance() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gaussian product: precisions add") {
  const auto a = GaussianMessage::from_moments(Complex{1.0, 0.0}, 1.0);
  const auto b = GaussianMessage::from_moments(Complex{0.0, 0.0}, 1.0);
  const auto p = gaussian_product(a, b);
  CHECK(p.mean.real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.variance() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gaussian product: commutative and associative on random inputs") {
  RngStream rng(11, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 200; ++rep) {
    const auto draw = [&]() {
      const double var = std::pow(10.0, 3.0 * (rng.next_double() - 0.5));
      return GaussianMessage::from_moments(rng.next_cgauss(1.0), var);
    };
    const auto a = draw(), b = draw(), c = draw();
    const auto ab = gaussian_product(a, b);
    const auto ba = gaussian_product(b, a);
    CHECK(std::abs(ab.mean - ba.mean) <= 1e-12 * (1.0 + std::abs(ab.mean)));
    CHECK(ab.precision == doctest::Approx(ba.precision).epsilon(1e-12));
    const auto ab_c = gaussian_product(ab, c);
    const auto a_bc = gaussian_product(a, gaussian_product(b, c));
    CHECK(std::abs(ab_c.mean - a_bc.mean) <= 1e-12 * (1.0 + std::abs(ab_c.mean)));
    CHECK(ab_c.precision == doctest::Approx(a_bc.precision).epsilon(1e-12));
  }
}

TEST_CASE("gaussian divide undoes gaussian product") {
  RngStream rng(13, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 200; ++rep) {
    const auto draw = [&]() {
      const double var = std::pow(10.0, 3.0 * (rng.next_double() - 0.5));
      return GaussianMessage::from_moments(rng.next_cgauss(1.0), var);
    };
    const auto a = draw(), b = draw();
    const auto back = gaussian_divide(gaussian_product(a, b), b);
    CHECK(std::abs(back.mean - a.mean) <= 1e-10 * (1.0 + std::abs(a.mean)));
    CHECK(back.precision == doctest::Approx(a.precision).epsilon(1e-10));
  }
}

TEST_CASE("rng: identical keys reproduce, distinct keys differ") {
  RngStream a(42, 7, StreamPurpose::Noise);
  RngStream b(42, 7, StreamPurpose::Noise);
  RngStream c(42, 8, StreamPurpose::Noise);
  RngStream d(42, 7, StreamPurpose::Channel);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs_c |= va != c.next_u64();
    differs_d |= va != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("rng: normal moments and bounded draws") {
  RngStream rng(5, 0, StreamPurpose::Generic);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
  for (int i = 0; i < 1000; ++i) CHECK(rng.next_below(17) < 17);
}
