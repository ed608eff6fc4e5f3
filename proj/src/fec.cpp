#include "noma/fec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "noma/rng.hpp"

namespace noma {

namespace {

constexpr int kConstraint = 7;
constexpr int kMemory = kConstraint - 1;    // 6 termination bits
constexpr unsigned kStates = 1u << kMemory; // 64
constexpr unsigned kGen0 = 0133;           // 1 + D^2 + D^3 + D^5 + D^6
constexpr unsigned kGen1 = 0171;           // 1 + D + D^2 + D^3 + D^6
constexpr double kNegInf = -1e30;

inline int parity(unsigned x) { return __builtin_parity(x); }

// Trellis tables indexed by reg = (input << 6) | state.
struct Trellis {
  std::uint8_t out0[2 * kStates];
  std::uint8_t out1[2 * kStates];

  Trellis() {
    for (unsigned reg = 0; reg < 2 * kStates; ++reg) {
      out0[reg] = static_cast<std::uint8_t>(parity(reg & kGen0));
      out1[reg] = static_cast<std::uint8_t>(parity(reg & kGen1));
    }
  }
};

const Trellis& trellis() {
  static const Trellis t;
  return t;
}

inline double max_star(double a, double b) {
  const double m = a > b ? a : b;
  const double d = a > b ? a - b : b - a;
  // exp(-25) is below double LLR resolution.
  return d > 25.0 ? m : m + std::log1p(std::exp(-d));
}

// Transmitted position i carries mother bit rate_match_index(i).
inline int rate_match_index(int i, int mother, int target) {
  if (target <= mother) {
    return static_cast<int>((static_cast<long long>(i) * mother) / target);
  }
  return i % mother;
}

std::uint16_t crc16_run(std::span<const std::uint8_t> bits) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t b : bits) {
    const std::uint16_t top = static_cast<std::uint16_t>((crc >> 15) & 1u);
    crc = static_cast<std::uint16_t>(crc << 1);
    if (top ^ (b & 1u)) crc ^= 0x1021;
  }
  return crc;
}

}  // namespace

BitVector crc16_attach(std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw std::invalid_argument("crc16_attach: empty payload");
  BitVector out(payload.begin(), payload.end());
  const std::uint16_t crc = crc16_run(payload);
  for (int i = 15; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((crc >> i) & 1u));
  return out;
}

bool crc16_check(std::span<const std::uint8_t> bits) {
  if (bits.size() <= 16) return false;
  return crc16_run(bits) == 0;
}

int CodeConfig::coded_bits() const {
  const double n = static_cast<double>(payload_bits) / rate;
  const int ni = static_cast<int>(std::llround(n));
  if (std::abs(n - ni) > 1e-9) {
    throw std::invalid_argument("CodeConfig: payload_bits / rate is not an integer");
  }
  return ni;
}

BitVector conv_encode(std::span<const std::uint8_t> payload, const CodeConfig& cfg) {
  if (static_cast<int>(payload.size()) != cfg.payload_bits) {
    throw std::invalid_argument("conv_encode: payload length " + std::to_string(payload.size()) +
                                " does not match configured " + std::to_string(cfg.payload_bits));
  }
  const Trellis& t = trellis();
  BitVector mother;
  mother.reserve(static_cast<std::size_t>(cfg.mother_bits()));
  unsigned state = 0;
  const int steps = cfg.payload_bits + kMemory;
  for (int i = 0; i < steps; ++i) {
    const unsigned u = i < cfg.payload_bits ? (payload[static_cast<std::size_t>(i)] & 1u) : 0u;
    const unsigned reg = (u << kMemory) | state;
    mother.push_back(t.out0[reg]);
    mother.push_back(t.out1[reg]);
    state = reg >> 1;
  }
  const int target = cfg.coded_bits();
  BitVector out(static_cast<std::size_t>(target));
  for (int i = 0; i < target; ++i) {
    out[static_cast<std::size_t>(i)] =
        mother[static_cast<std::size_t>(rate_match_index(i, cfg.mother_bits(), target))];
  }
  return out;
}

std::vector<int> interleaver_permutation(std::uint64_t seed, int length) {
  std::vector<int> perm(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) perm[static_cast<std::size_t>(i)] = i;
  RngStream rng(seed, static_cast<std::uint64_t>(length), StreamPurpose::Interleaver);
  for (int i = length - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
  }
  return perm;
}

BitVector interleave_bits(std::span<const std::uint8_t> bits, std::uint64_t seed) {
  const auto perm = interleaver_permutation(seed, static_cast<int>(bits.size()));
  BitVector out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[static_cast<std::size_t>(perm[i])];
  return out;
}

LlrVector interleave_llrs(const LlrVector& llrs, std::uint64_t seed) {
  const auto perm = interleaver_permutation(seed, static_cast<int>(llrs.size()));
  LlrVector out(llrs.size());
  for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = llrs[static_cast<std::size_t>(perm[i])];
  return out;
}

LlrVector deinterleave_llrs(const LlrVector& llrs, std::uint64_t seed) {
  const auto perm = interleaver_permutation(seed, static_cast<int>(llrs.size()));
  LlrVector out(llrs.size());
  for (std::size_t i = 0; i < llrs.size(); ++i) out[static_cast<std::size_t>(perm[i])] = llrs[i];
  return out;
}

SisoResult siso_decode(const LlrVector& prior, const CodeConfig& cfg) {
  const int target = cfg.coded_bits();
  if (static_cast<int>(prior.size()) != target) {
    throw std::invalid_argument("siso_decode: prior length " + std::to_string(prior.size()) +
                                " does not match coded length " + std::to_string(target));
  }
  const Trellis& t = trellis();
  const int mother = cfg.mother_bits();
  const int steps = cfg.payload_bits + kMemory;

  // Accumulate transmitted-position LLRs onto mother positions (repetition
  // combines, punctured positions stay at zero).
  std::vector<double> mprior(static_cast<std::size_t>(mother), 0.0);
  for (int i = 0; i < target; ++i) {
    mprior[static_cast<std::size_t>(rate_match_index(i, mother, target))] += prior[static_cast<std::size_t>(i)];
  }

  // Branch metric: log P(c=v) = const + (1-2v) * llr/2 summed over the two
  // output bits; the four (v0,v1) combinations are precomputed per step.
  std::vector<double> gamma(static_cast<std::size_t>(steps) * 4);
  for (int i = 0; i < steps; ++i) {
    const double l0 = 0.5 * mprior[static_cast<std::size_t>(2 * i)];
    const double l1 = 0.5 * mprior[static_cast<std::size_t>(2 * i + 1)];
    double* g = &gamma[static_cast<std::size_t>(i) * 4];
    g[0] = +l0 + l1;
    g[1] = +l0 - l1;
    g[2] = -l0 + l1;
    g[3] = -l0 - l1;
  }

  std::vector<double> alpha(static_cast<std::size_t>(steps + 1) * kStates, kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(steps + 1) * kStates, kNegInf);
  alpha[0] = 0.0;
  beta[static_cast<std::size_t>(steps) * kStates] = 0.0;

  for (int i = 0; i < steps; ++i) {
    const double* g = &gamma[static_cast<std::size_t>(i) * 4];
    const double* a = &alpha[static_cast<std::size_t>(i) * kStates];
    double* an = &alpha[static_cast<std::size_t>(i + 1) * kStates];
    const unsigned max_u = i < cfg.payload_bits ? 2u : 1u;  // termination forces 0
    double norm = kNegInf;
    for (unsigned u = 0; u < max_u; ++u) {
      for (unsigned s = 0; s < kStates; ++s) {
        const double as = a[s];
        if (as <= kNegInf) continue;
        const unsigned reg = (u << kMemory) | s;
        const unsigned next = reg >> 1;
        const double m = as + g[(t.out0[reg] << 1) | t.out1[reg]];
        an[next] = an[next] <= kNegInf ? m : max_star(an[next], m);
      }
    }
    for (unsigned s = 0; s < kStates; ++s) norm = std::max(norm, an[s]);
    for (unsigned s = 0; s < kStates; ++s) {
      if (an[s] > kNegInf) an[s] -= norm;
    }
  }

  for (int i = steps - 1; i >= 0; --i) {
    const double* g = &gamma[static_cast<std::size_t>(i) * 4];
    const double* bn = &beta[static_cast<std::size_t>(i + 1) * kStates];
    double* b = &beta[static_cast<std::size_t>(i) * kStates];
    const unsigned max_u = i < cfg.payload_bits ? 2u : 1u;
    double norm = kNegInf;
    for (unsigned s = 0; s < kStates; ++s) {
      double acc = kNegInf;
      for (unsigned u = 0; u < max_u; ++u) {
        const unsigned reg = (u << kMemory) | s;
        const double bb = bn[reg >> 1];
        if (bb <= kNegInf) continue;
        const double m = bb + g[(t.out0[reg] << 1) | t.out1[reg]];
        acc = acc <= kNegInf ? m : max_star(acc, m);
      }
      b[s] = acc;
      norm = std::max(norm, acc);
    }
    if (norm > kNegInf) {
      for (unsigned s = 0; s < kStates; ++s) {
        if (b[s] > kNegInf) b[s] -= norm;
      }
    }
  }

  // Edge posteriors -> coded-bit and input-bit APPs.
  std::vector<double> mposterior(static_cast<std::size_t>(mother));
  SisoResult res;
  res.hard_payload.resize(static_cast<std::size_t>(cfg.payload_bits));
  for (int i = 0; i < steps; ++i) {
    const double* g = &gamma[static_cast<std::size_t>(i) * 4];
    const double* a = &alpha[static_cast<std::size_t>(i) * kStates];
    const double* bn = &beta[static_cast<std::size_t>(i + 1) * kStates];
    const unsigned max_u = i < cfg.payload_bits ? 2u : 1u;
    double acc0[2] = {kNegInf, kNegInf};  // out bit 0 == {0, 1}
    double acc1[2] = {kNegInf, kNegInf};
    double accu[2] = {kNegInf, kNegInf};  // input bit
    for (unsigned u = 0; u < max_u; ++u) {
      for (unsigned s = 0; s < kStates; ++s) {
        const double as = a[s];
        if (as <= kNegInf) continue;
        const unsigned reg = (u << kMemory) | s;
        const double bb = bn[reg >> 1];
        if (bb <= kNegInf) continue;
        const double m = as + g[(t.out0[reg] << 1) | t.out1[reg]] + bb;
        acc0[t.out0[reg]] = acc0[t.out0[reg]] <= kNegInf ? m : max_star(acc0[t.out0[reg]], m);
        acc1[t.out1[reg]] = acc1[t.out1[reg]] <= kNegInf ? m : max_star(acc1[t.out1[reg]], m);
        if (max_u == 2) accu[u] = accu[u] <= kNegInf ? m : max_star(accu[u], m);
      }
    }
    mposterior[static_cast<std::size_t>(2 * i)] = acc0[0] - acc0[1];
    mposterior[static_cast<std::size_t>(2 * i + 1)] = acc1[0] - acc1[1];
    if (i < cfg.payload_bits) {
      res.hard_payload[static_cast<std::size_t>(i)] = accu[0] >= accu[1] ? 0 : 1;
    }
  }

  res.posterior.resize(static_cast<std::size_t>(target));
  res.extrinsic.resize(static_cast<std::size_t>(target));
  for (int i = 0; i < target; ++i) {
    const auto m = static_cast<std::size_t>(rate_match_index(i, mother, target));
    res.posterior[static_cast<std::size_t>(i)] = mposterior[m];
    const double e = mposterior[m] - mprior[m];
    res.extrinsic[static_cast<std::size_t>(i)] = std::clamp(e, -kLlrMax, kLlrMax);
  }
  return res;
}

}  // namespace noma
