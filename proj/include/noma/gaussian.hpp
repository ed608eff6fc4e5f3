#pragma once

#include <limits>

#include "noma/types.hpp"

namespace noma {

// Scalar circularly-symmetric complex Gaussian message. Stored in natural
// parameters: precision == 0 encodes infinite variance (the non-informative
// message), which keeps the extrinsic update arithmetic total at
// initialization.
struct GaussianMessage {
  Complex mean{0.0, 0.0};
  double precision{0.0};

  static GaussianMessage non_informative() { return {}; }

  static GaussianMessage from_moments(Complex mean, double variance) {
    GaussianMessage m;
    m.mean = mean;
    m.precision = std::isinf(variance) ? 0.0 : 1.0 / variance;
    return m;
  }

  double variance() const {
    return precision > 0.0 ? 1.0 / precision : std::numeric_limits<double>::infinity();
  }

  bool informative() const { return precision > 0.0; }
};

// Product of two Gaussian densities: precisions add, precision-weighted
// means add. A non-informative operand acts as identity.
inline GaussianMessage gaussian_product(const GaussianMessage& a, const GaussianMessage& b) {
  GaussianMessage out;
  out.precision = a.precision + b.precision;
  if (out.precision > 0.0) {
    out.mean = (a.mean * a.precision + b.mean * b.precision) / out.precision;
  }
  return out;
}

// Quotient of two Gaussian densities: precisions subtract. A result with
// precision <= kPrecFloor (including the negative-variance case) is replaced
// by a wide message with variance kVarCap keeping the numerator mean.
inline GaussianMessage gaussian_divide(const GaussianMessage& num, const GaussianMessage& den) {
  if (den.precision == 0.0) return num;
  GaussianMessage out;
  out.precision = num.precision - den.precision;
  if (out.precision <= kPrecFloor) {
    out.precision = 1.0 / kVarCap;
    out.mean = num.mean;
    return out;
  }
  out.mean = (num.mean * num.precision - den.mean * den.precision) / out.precision;
  return out;
}

}  // namespace noma
