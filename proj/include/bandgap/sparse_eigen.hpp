#pragma once

#include <vector>

#include "bandgap/types.hpp"

namespace bandgap {

/// Eigenpairs of a Hermitian pencil, ascending, eigenvectors M-normalized.
struct EigenPairs {
  std::vector<double> values;
  CMatrix vectors;
};

struct ShiftInvertOptions {
  double tol = 1e-13;
  int max_restarts = 2000;
  int ncv = 0;  // 0 = automatic
};

/// The nev eigenpairs of A x = lambda M x nearest to sigma (A Hermitian,
/// M Hermitian positive definite), by ARPACK in shift-invert mode.
/// Throws SolverError with ARPACK diagnostics on failure.
EigenPairs hermitian_eigs_near(const SpMatrix& A, const SpMatrix& M, double sigma, int nev,
                               const ShiftInvertOptions& opts = {});

/// Number of eigenvalues of (A, M) strictly below sigma, from the inertia of
/// an LDL^* factorization of A - sigma M. Returns -1 when the factorization
/// breaks down (sigma on or numerically at an eigenvalue).
int count_eigenvalues_below(const SpMatrix& A, const SpMatrix& M, double sigma);

/// The nev smallest eigenpairs. `guess` is a starting point for the lower
/// bound search; it is lowered until no eigenvalue lies below it.
EigenPairs smallest_hermitian_eigs(const SpMatrix& A, const SpMatrix& M, int nev, double guess,
                                   const ShiftInvertOptions& opts = {});

}  // namespace bandgap
