#include "noma/linalg.hpp"

#include <cmath>

namespace noma::linalg {

bool cholesky(std::span<Complex> a, int n) {
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j * n + j)].real();
    for (int k = 0; k < j; ++k) d -= std::norm(a[static_cast<std::size_t>(j * n + k)]);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double root = std::sqrt(d);
    a[static_cast<std::size_t>(j * n + j)] = {root, 0.0};
    for (int i = j + 1; i < n; ++i) {
      Complex s = a[static_cast<std::size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) {
        s -= a[static_cast<std::size_t>(i * n + k)] * std::conj(a[static_cast<std::size_t>(j * n + k)]);
      }
      a[static_cast<std::size_t>(i * n + j)] = s / root;
    }
  }
  return true;
}

void cholesky_solve(std::span<const Complex> chol, int n, std::span<Complex> b) {
  // L y = b
  for (int i = 0; i < n; ++i) {
    Complex s = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= chol[static_cast<std::size_t>(i * n + k)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = s / chol[static_cast<std::size_t>(i * n + i)].real();
  }
  // L^H x = y
  for (int i = n - 1; i >= 0; --i) {
    Complex s = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) {
      s -= std::conj(chol[static_cast<std::size_t>(k * n + i)]) * b[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(i)] = s / chol[static_cast<std::size_t>(i * n + i)].real();
  }
}

}  // namespace noma::linalg
