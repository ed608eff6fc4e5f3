#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noma/types.hpp"

namespace noma {

// Gray-labeled constellation with unit average energy. Points are indexed by
// label: the J-bit label read MSB-first equals the point index.
struct Constellation {
  int order = 0;                 // M, power of two
  std::vector<Complex> points;   // size M, label-indexed

  int bits_per_symbol() const;   // J = log2(M)
};

// BPSK (label 0 -> +1), Gray QPSK (first bit flips the real sign, second the
// imaginary sign, 0 -> positive), or Gray 16QAM (bits 0..1 select the real
// level, bits 2..3 the imaginary level, per-axis Gray order -3,-1,+1,+3
// scaled by 1/sqrt(10)).
Constellation build_qam(int order);

// Per-user codebook: M complex L-dimensional codewords, label-indexed.
struct Codebook {
  int user_id = 0;
  int num_res = 0;                              // L
  std::vector<std::vector<Complex>> codewords;  // [label][l]
  std::vector<int> support;                     // REs with any nonzero entry, ascending

  int order() const { return static_cast<int>(codewords.size()); }
  int bits_per_symbol() const;

  // Labels whose bit j (MSB-first) equals the given value; each set has M/2
  // elements.
  std::vector<int> labels_with_bit(int j, int value) const;
};

// Codeword = sequence * constellation point. The sequence must have unit norm.
Codebook build_spread_codebook(const Constellation& c, std::span<const Complex> seq, int user_id);

// Codewords are zero off the mask; `vals` gives the nonzero chips (same order
// as mask) and must have unit norm. `num_res` is the full RE count L.
Codebook build_sparse_codebook(const Constellation& c, int num_res, const std::vector<int>& mask,
                               std::span<const Complex> vals, int user_id);

// Label <-> bit helpers; bits are MSB-first.
int label_from_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> bits_from_label(int label, int num_bits);

// Returns the codeword whose label equals the given coded bits.
const std::vector<Complex>& map_bits(std::span<const std::uint8_t> bits, const Codebook& cb);

// Built-in length-4 spreading signatures for up to 8 users: two mutually
// unbiased quaternary bases with entries in {+-1, +-i}/2; cross-correlation
// magnitude is 0 within a basis and 1/2 across bases.
std::vector<Complex> fds_signature(int user);

// Built-in sparse pattern: user k occupies the k-th (L/2)-subset of {0..L-1}
// in lexicographic order, chips (1/sqrt(L/2)) * i^k.
std::vector<int> sparse_mask(int user, int num_res);
std::vector<Complex> sparse_values(int user, int num_res);

// Plain-text codebook file: header "K L M", then per user M lines of L
// entries "re:im", labels in ascending binary order.
std::string codebooks_to_text(std::span<const Codebook> cbs);
std::vector<Codebook> codebooks_from_text(const std::string& text);

}  // namespace noma
