#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "noma/fec.hpp"
#include "noma/rng.hpp"

using namespace noma;

namespace {

BitVector random_bits(RngStream& rng, int n) {
  BitVector b(static_cast<std::size_t>(n));
  for (auto& v : b) v = static_cast<std::uint8_t>(rng.next_bit());
  return b;
}

CodeConfig make_cfg(int payload_bits, double rate = 0.5, std::uint64_t seed = 1) {
  CodeConfig cfg;
  cfg.payload_bits = payload_bits;
  cfg.rate = rate;
  cfg.interleaver_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("crc: attach/check round trip on random payloads") {
  RngStream rng(1, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = 8 + static_cast<int>(rng.next_below(120));
    const BitVector payload = random_bits(rng, n);
    const BitVector framed = crc16_attach(payload);
    CHECK(framed.size() == payload.size() + 16);
    CHECK(crc16_check(framed));
  }
}

TEST_CASE("crc: any single flipped bit is detected") {
  RngStream rng(2, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = 8 + static_cast<int>(rng.next_below(64));
    BitVector framed = crc16_attach(random_bits(rng, n));
    const auto flip = static_cast<std::size_t>(rng.next_below(framed.size()));
    framed[flip] ^= 1;
    CHECK_FALSE(crc16_check(framed));
  }
}

TEST_CASE("crc: empty payload rejected") {
  CHECK_THROWS_AS(crc16_attach({}), std::invalid_argument);
  CHECK_FALSE(crc16_check(BitVector(16, 0)));
}

TEST_CASE("encoder: all-zero payload gives the all-zero codeword") {
  const CodeConfig cfg = make_cfg(64);
  const BitVector coded = conv_encode(BitVector(64, 0), cfg);
  CHECK(static_cast<int>(coded.size()) == cfg.coded_bits());
  for (std::uint8_t b : coded) CHECK(b == 0);
}

TEST_CASE("encoder: mother length is 2*(payload+6), output is deterministic") {
  const CodeConfig cfg = make_cfg(80);
  CHECK(cfg.mother_bits() == 2 * (80 + 6));
  CHECK(cfg.coded_bits() == 160);
  RngStream rng(3, 0, StreamPurpose::Generic);
  const BitVector payload = random_bits(rng, 80);
  CHECK(conv_encode(payload, cfg) == conv_encode(payload, cfg));
  CHECK_THROWS_AS(conv_encode(BitVector(79, 0), cfg), std::invalid_argument);
}

TEST_CASE("encoder: non-integral coded length is rejected") {
  CodeConfig cfg = make_cfg(65, 0.4);
  CHECK_THROWS_AS(cfg.coded_bits(), std::invalid_argument);
}

TEST_CASE("interleaver: round trip identity on random inputs") {
  RngStream rng(4, 0, StreamPurpose::Generic);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(300));
    const std::uint64_t seed = rng.next_u64();
    LlrVector x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.next_normal();
    CHECK(deinterleave_llrs(interleave_llrs(x, seed), seed) == x);
  }
}

TEST_CASE("interleaver: distinct seeds give distinct permutations") {
  std::set<std::vector<int>> perms;
  for (std::uint64_t seed = 0; seed < 8; ++seed) perms.insert(interleaver_permutation(seed, 224));
  CHECK(perms.size() == 8);
  // depends only on (seed, length)
  CHECK(interleaver_permutation(5, 100) == interleaver_permutation(5, 100));
}

TEST_CASE("siso: saturated matching priors recover the payload") {
  RngStream rng(5, 0, StreamPurpose::Generic);
  for (double rate : {0.5, 0.4}) {
    const CodeConfig cfg = make_cfg(80, rate);
    const BitVector payload = random_bits(rng, 80);
    const BitVector coded = conv_encode(payload, cfg);
    LlrVector prior(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) prior[i] = coded[i] ? -kLlrMax : kLlrMax;
    const SisoResult res = siso_decode(prior, cfg);
    CHECK(res.hard_payload == payload);
  }
}

TEST_CASE("siso: all-zero priors give all-zero extrinsics") {
  const CodeConfig cfg = make_cfg(64);
  const SisoResult res = siso_decode(LlrVector(static_cast<std::size_t>(cfg.coded_bits()), 0.0), cfg);
  for (double e : res.extrinsic) CHECK(std::abs(e) < 1e-9);
}

TEST_CASE("siso: extrinsic plus prior equals posterior pre-clamp") {
  RngStream rng(6, 0, StreamPurpose::Generic);
  const CodeConfig cfg = make_cfg(64);
  LlrVector prior(static_cast<std::size_t>(cfg.coded_bits()));
  for (auto& v : prior) v = 2.0 * rng.next_normal();
  const SisoResult res = siso_decode(prior, cfg);
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double e = res.posterior[i] - prior[i];
    if (std::abs(e) < kLlrMax) CHECK(res.extrinsic[i] == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("siso: label-flip symmetry of the linear code") {
  RngStream rng(7, 0, StreamPurpose::Generic);
  const CodeConfig cfg = make_cfg(48);
  LlrVector prior(static_cast<std::size_t>(cfg.coded_bits()));
  for (auto& v : prior) v = 1.5 * rng.next_normal();
  const SisoResult base = siso_decode(prior, cfg);

  const BitVector shift_payload = random_bits(rng, 48);
  const BitVector shift_code = conv_encode(shift_payload, cfg);
  LlrVector flipped(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) flipped[i] = shift_code[i] ? -prior[i] : prior[i];
  const SisoResult shifted = siso_decode(flipped, cfg);

  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double expect = shift_code[i] ? -base.posterior[i] : base.posterior[i];
    CHECK(shifted.posterior[i] == doctest::Approx(expect).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < shifted.hard_payload.size(); ++i) {
    CHECK(shifted.hard_payload[i] == (base.hard_payload[i] ^ shift_payload[i]));
  }
}

TEST_CASE("siso: coded-BER waterfall at the 10% uncoded operating point") {
  // Channel LLRs at the noise level where hard decisions are wrong 10% of the
  // time; the decoded BER of the (133,171) code must come out below 1e-2.
  RngStream rng(8, 0, StreamPurpose::Generic);
  const CodeConfig cfg = make_cfg(64);
  const double sigma = 1.0 / 1.2815515655446004;  // Q(1/sigma) = 0.1
  long long uncoded_err = 0, coded_err = 0, uncoded_n = 0, coded_n = 0;
  for (int block = 0; block < 10000; ++block) {
    const BitVector payload = random_bits(rng, 64);
    const BitVector coded = conv_encode(payload, cfg);
    LlrVector prior(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) {
      const double x = coded[i] ? -1.0 : 1.0;
      const double y = x + sigma * rng.next_normal();
      prior[i] = 2.0 * y / (sigma * sigma);
      uncoded_err += (y >= 0.0 ? 0 : 1) != coded[i];
      ++uncoded_n;
    }
    const SisoResult res = siso_decode(prior, cfg);
    for (std::size_t i = 0; i < payload.size(); ++i) coded_err += res.hard_payload[i] != payload[i];
    coded_n += static_cast<long long>(payload.size());
  }
  const double uncoded_ber = static_cast<double>(uncoded_err) / static_cast<double>(uncoded_n);
  const double coded_ber = static_cast<double>(coded_err) / static_cast<double>(coded_n);
  CHECK(uncoded_ber == doctest::Approx(0.10).epsilon(0.05));
  CHECK(coded_ber < 1e-2);
}

TEST_CASE("rate matching: repetition decodes and combines") {
  RngStream rng(9, 0, StreamPurpose::Generic);
  const CodeConfig cfg = make_cfg(60, 0.25);  // coded = 240 > mother = 132
  const BitVector payload = random_bits(rng, 60);
  const BitVector coded = conv_encode(payload, cfg);
  CHECK(static_cast<int>(coded.size()) == 240);
  LlrVector prior(coded.size());
  for (std::size_t i = 0; i < coded.size(); ++i) {
    prior[i] = (coded[i] ? -1.0 : 1.0) * 3.0 + rng.next_normal();
  }
  const SisoResult res = siso_decode(prior, cfg);
  CHECK(res.hard_payload == payload);
}
