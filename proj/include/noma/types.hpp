#pragma once

#include <complex>
#include <vector>

namespace noma {

using Complex = std::complex<double>;

// Log-likelihood ratio per coded bit, sign convention: positive means bit 0
// is more likely, i.e. llr = log P(c=0) / P(c=1).
using LlrVector = std::vector<double>;

// Discrete distribution over one user's codebook, indexed by codeword label.
using SymbolPosterior = std::vector<double>;

// One row per user: prior probability of each codeword.
using PriorTable = std::vector<std::vector<double>>;

// LLRs are clamped to +/- kLlrMax before they cross module boundaries.
inline constexpr double kLlrMax = 30.0;

// Floors/caps for the Gaussian message algebra.
inline constexpr double kVarFloor = 1e-8;
inline constexpr double kPrecFloor = 1e-8;
inline constexpr double kVarCap = 1e8;

}  // namespace noma
