#pragma once

#include <span>

#include "noma/types.hpp"

namespace noma::linalg {

// In-place Cholesky factorization of a Hermitian positive-definite n x n
// matrix stored row-major (lower triangle used). Returns false if a pivot is
// not strictly positive.
bool cholesky(std::span<Complex> a, int n);

// Solves A x = b in place given the Cholesky factor from cholesky().
void cholesky_solve(std::span<const Complex> chol, int n, std::span<Complex> b);

}  // namespace noma::linalg
