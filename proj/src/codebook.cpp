#include "noma/codebook.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace noma {

namespace {

int ilog2(int m) {
  int j = 0;
  while ((1 << j) < m) ++j;
  return j;
}

// Per-axis Gray order for the 4-level axis of 16QAM.
constexpr double kQam16Levels[4] = {-3.0, -1.0, +1.0, +3.0};
constexpr int kQam16Gray[4] = {0, 1, 3, 2};  // bit pair -> level index

}  // namespace

int Constellation::bits_per_symbol() const { return ilog2(order); }

int Codebook::bits_per_symbol() const { return ilog2(order()); }

std::vector<int> Codebook::labels_with_bit(int j, int value) const {
  const int bits = bits_per_symbol();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(order()) / 2);
  for (int label = 0; label < order(); ++label) {
    if (((label >> (bits - 1 - j)) & 1) == value) out.push_back(label);
  }
  return out;
}

Constellation build_qam(int order) {
  Constellation c;
  c.order = order;
  c.points.resize(static_cast<std::size_t>(order));
  switch (order) {
    case 2:
      c.points[0] = {+1.0, 0.0};
      c.points[1] = {-1.0, 0.0};
      break;
    case 4: {
      const double s = 1.0 / std::sqrt(2.0);
      for (int label = 0; label < 4; ++label) {
        const double re = (label & 2) ? -s : +s;
        const double im = (label & 1) ? -s : +s;
        c.points[static_cast<std::size_t>(label)] = {re, im};
      }
      break;
    }
    case 16: {
      const double s = 1.0 / std::sqrt(10.0);
      for (int label = 0; label < 16; ++label) {
        const int re_bits = (label >> 2) & 3;
        const int im_bits = label & 3;
        const double re = kQam16Levels[kQam16Gray[re_bits]] * s;
        const double im = kQam16Levels[kQam16Gray[im_bits]] * s;
        c.points[static_cast<std::size_t>(label)] = {re, im};
      }
      break;
    }
    default:
      throw std::invalid_argument("build_qam: unsupported modulation order " + std::to_string(order));
  }
  return c;
}

Codebook build_spread_codebook(const Constellation& c, std::span<const Complex> seq, int user_id) {
  double norm2 = 0.0;
  for (const Complex& v : seq) norm2 += std::norm(v);
  if (seq.empty() || norm2 < 1e-30) {
    throw std::invalid_argument("build_spread_codebook: zero spreading sequence for user " +
                                std::to_string(user_id));
  }
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw std::invalid_argument("build_spread_codebook: sequence of user " + std::to_string(user_id) +
                                " is not unit norm");
  }
  Codebook cb;
  cb.user_id = user_id;
  cb.num_res = static_cast<int>(seq.size());
  cb.codewords.resize(c.points.size());
  for (std::size_t label = 0; label < c.points.size(); ++label) {
    cb.codewords[label].resize(seq.size());
    for (std::size_t l = 0; l < seq.size(); ++l) cb.codewords[label][l] = seq[l] * c.points[label];
  }
  for (std::size_t l = 0; l < seq.size(); ++l) {
    if (std::norm(seq[l]) > 0.0) cb.support.push_back(static_cast<int>(l));
  }
  return cb;
}

Codebook build_sparse_codebook(const Constellation& c, int num_res, const std::vector<int>& mask,
                               std::span<const Complex> vals, int user_id) {
  if (mask.empty()) {
    throw std::invalid_argument("build_sparse_codebook: empty mask for user " + std::to_string(user_id));
  }
  if (mask.size() != vals.size()) {
    throw std::invalid_argument("build_sparse_codebook: mask/value size mismatch for user " +
                                std::to_string(user_id));
  }
  std::vector<Complex> seq(static_cast<std::size_t>(num_res), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] < 0 || mask[i] >= num_res) {
      throw std::invalid_argument("build_sparse_codebook: RE index out of range for user " +
                                  std::to_string(user_id));
    }
    seq[static_cast<std::size_t>(mask[i])] = vals[i];
  }
  return build_spread_codebook(c, seq, user_id);
}

int label_from_bits(std::span<const std::uint8_t> bits) {
  int label = 0;
  for (std::uint8_t b : bits) label = (label << 1) | (b & 1);
  return label;
}

std::vector<std::uint8_t> bits_from_label(int label, int num_bits) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_bits));
  for (int j = 0; j < num_bits; ++j) {
    bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((label >> (num_bits - 1 - j)) & 1);
  }
  return bits;
}

const std::vector<Complex>& map_bits(std::span<const std::uint8_t> bits, const Codebook& cb) {
  if (static_cast<int>(bits.size()) != cb.bits_per_symbol()) {
    throw std::invalid_argument("map_bits: expected " + std::to_string(cb.bits_per_symbol()) +
                                " bits, got " + std::to_string(bits.size()));
  }
  return cb.codewords[static_cast<std::size_t>(label_from_bits(bits))];
}

std::vector<Complex> fds_signature(int user) {
  static const Complex I{0.0, 1.0};
  // Rows 0-3: real Hadamard basis. Rows 4-7: a second basis unbiased to the
  // first; every cross-basis inner product has magnitude 1/2.
  static const Complex kTable[8][4] = {
      {{1, 0}, {1, 0}, {1, 0}, {1, 0}},
      {{1, 0}, {1, 0}, {-1, 0}, {-1, 0}},
      {{1, 0}, {-1, 0}, {-1, 0}, {1, 0}},
      {{1, 0}, {-1, 0}, {1, 0}, {-1, 0}},
      {{1, 0}, {-1, 0}, {0, -1}, {0, -1}},
      {{1, 0}, {-1, 0}, {0, 1}, {0, 1}},
      {{1, 0}, {1, 0}, {0, 1}, {0, -1}},
      {{1, 0}, {1, 0}, {0, -1}, {0, 1}},
  };
  if (user < 0 || user >= 8) {
    throw std::invalid_argument("fds_signature: only 8 built-in signatures, asked for user " +
                                std::to_string(user));
  }
  std::vector<Complex> seq(4);
  for (int l = 0; l < 4; ++l) seq[static_cast<std::size_t>(l)] = kTable[user][l] * 0.5;
  return seq;
}

std::vector<int> sparse_mask(int user, int num_res) {
  const int m = std::max(1, num_res / 2);
  // Enumerate m-subsets of {0..L-1} in lexicographic order and take the
  // user-th one.
  std::vector<int> subset(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) subset[static_cast<std::size_t>(i)] = i;
  for (int count = 0; count < user; ++count) {
    int i = m - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == num_res - m + i) --i;
    if (i < 0) {
      throw std::invalid_argument("sparse_mask: not enough distinct masks for user " +
                                  std::to_string(user));
    }
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) {
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return subset;
}

std::vector<Complex> sparse_values(int user, int num_res) {
  const int m = std::max(1, num_res / 2);
  const double a = 1.0 / std::sqrt(static_cast<double>(m));
  static const Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return std::vector<Complex>(static_cast<std::size_t>(m), kPhases[user % 4] * a);
}

std::string codebooks_to_text(std::span<const Codebook> cbs) {
  std::ostringstream os;
  os.precision(17);
  const int L = cbs.empty() ? 0 : cbs[0].num_res;
  const int M = cbs.empty() ? 0 : cbs[0].order();
  os << cbs.size() << ' ' << L << ' ' << M << '\n';
  for (const Codebook& cb : cbs) {
    for (const auto& cw : cb.codewords) {
      for (std::size_t l = 0; l < cw.size(); ++l) {
        if (l) os << ' ';
        os << cw[l].real() << ':' << cw[l].imag();
      }
      os << '\n';
    }
  }
  return os.str();
}

std::vector<Codebook> codebooks_from_text(const std::string& text) {
  std::istringstream is(text);
  int K = 0, L = 0, M = 0;
  if (!(is >> K >> L >> M) || K <= 0 || L <= 0 || M <= 0) {
    throw std::invalid_argument("codebook file: bad header, expected 'K L M'");
  }
  std::vector<Codebook> cbs(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Codebook& cb = cbs[static_cast<std::size_t>(k)];
    cb.user_id = k;
    cb.num_res = L;
    cb.codewords.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
      auto& cw = cb.codewords[static_cast<std::size_t>(m)];
      cw.resize(static_cast<std::size_t>(L));
      for (int l = 0; l < L; ++l) {
        std::string tok;
        if (!(is >> tok)) {
          throw std::invalid_argument("codebook file: truncated at user " + std::to_string(k) +
                                      " codeword " + std::to_string(m));
        }
        const std::size_t colon = tok.find(':');
        if (colon == std::string::npos) {
          throw std::invalid_argument("codebook file: entry '" + tok + "' is not 're:im'");
        }
        cw[static_cast<std::size_t>(l)] = {std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))};
      }
    }
    for (int l = 0; l < L; ++l) {
      bool nonzero = false;
      for (const auto& cw : cb.codewords) {
        if (std::norm(cw[static_cast<std::size_t>(l)]) > 0.0) nonzero = true;
      }
      if (nonzero) cb.support.push_back(l);
    }
    if (cb.support.empty()) {
      throw std::invalid_argument("codebook file: user " + std::to_string(k) + " has empty support");
    }
  }
  std::string trailing;
  if (is >> trailing) {
    throw std::invalid_argument("codebook file: trailing data after last codeword");
  }
  return cbs;
}

}  // namespace noma
