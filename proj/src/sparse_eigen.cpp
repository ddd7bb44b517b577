#include "bandgap/sparse_eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <arpack/arpack.hpp>

namespace bandgap {

namespace {

// ARPACK keeps state in Fortran SAVE variables; calls are serialized.
std::mutex arpack_mutex;

EigenPairs sort_and_normalize(std::vector<double> values, CMatrix vectors, const SpMatrix& M) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  EigenPairs out;
  out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(order.size()));
  for (std::size_t c = 0; c < order.size(); ++c) {
    CVector v = vectors.col(order[c]);
    const double nrm = std::sqrt(std::abs(v.dot(M * v)));
    // Fix the global phase so the largest entry is real positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const Complex ph = std::abs(v[imax]) > 0.0 ? std::conj(v[imax]) / std::abs(v[imax]) : Complex(1.0);
    out.vectors.col(static_cast<Eigen::Index>(c)) = v * (ph / nrm);
    out.values.push_back(values[order[c]]);
  }
  return out;
}

EigenPairs dense_eigs_near(const SpMatrix& A, const SpMatrix& M, double sigma, int nev) {
  const CMatrix Ad = CMatrix(A);
  const CMatrix Md = CMatrix(M);
  const CMatrix Ah = 0.5 * (Ad + Ad.adjoint());
  const CMatrix Mh = 0.5 * (Md + Md.adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(Ah, Mh);
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolve failed");
  const auto& ev = es.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(ev.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(ev[a] - sigma) < std::abs(ev[b] - sigma); });
  const int take = std::min<int>(nev, static_cast<int>(ev.size()));
  std::vector<double> values;
  CMatrix vectors(A.rows(), take);
  for (int i = 0; i < take; ++i) {
    values.push_back(ev[order[i]]);
    vectors.col(i) = es.eigenvectors().col(order[i]);
  }
  return sort_and_normalize(std::move(values), std::move(vectors), M);
}

}  // namespace

EigenPairs hermitian_eigs_near(const SpMatrix& A, const SpMatrix& M, double sigma, int nev,
                               const ShiftInvertOptions& opts) {
  const auto n = static_cast<a_int>(A.rows());
  if (nev < 1) throw SolverError("eigensolver: nev must be positive");
  if (n <= 4 * nev + 40) return dense_eigs_near(A, M, sigma, nev);

  SpMatrix shifted = A - Complex(sigma) * M;
  shifted.makeCompressed();
  Eigen::SparseLU<SpMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw SolverError("eigensolver: shift-invert factorization failed at sigma = " + std::to_string(sigma));

  const a_int ncv = std::min<a_int>(n, opts.ncv > 0 ? opts.ncv : std::max(2 * nev + 1, 24));
  const a_int lworkl = 3 * ncv * ncv + 5 * ncv;
  std::vector<Complex> resid(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n) * ncv),
      workd(3 * static_cast<std::size_t>(n)), workl(static_cast<std::size_t>(lworkl));
  std::vector<double> rwork(static_cast<std::size_t>(ncv));
  // Deterministic start vector so repeated runs are bit-identical.
  for (a_int i = 0; i < n; ++i) resid[i] = Complex(1.0 + 0.25 * std::sin(0.7 * i), 0.1 * std::cos(1.3 * i));

  std::array<a_int, 11> iparam{};
  std::array<a_int, 14> ipntr{};
  iparam[0] = 1;
  iparam[2] = opts.max_restarts;
  iparam[6] = 3;
  a_int ido = 0;
  a_int info = 1;

  std::lock_guard<std::mutex> lock(arpack_mutex);
  auto view = [&](a_int p) { return Eigen::Map<CVector>(workd.data() + (p - 1), n); };
  for (;;) {
    arpack::naupd(ido, arpack::bmat::generalized, n, arpack::which::largest_magnitude, nev, opts.tol,
                  resid.data(), ncv, v.data(), n, iparam.data(), ipntr.data(), workd.data(), workl.data(),
                  lworkl, rwork.data(), info);
    if (ido == -1) {
      view(ipntr[1]) = lu.solve(M * view(ipntr[0]));
    } else if (ido == 1) {
      view(ipntr[1]) = lu.solve(view(ipntr[2]));
    } else if (ido == 2) {
      view(ipntr[1]) = M * view(ipntr[0]);
    } else {
      break;
    }
  }
  if (info < 0 || (info == 1 && iparam[4] < nev))
    throw SolverError("eigensolver: znaupd info = " + std::to_string(info) + ", converged " +
                      std::to_string(iparam[4]) + " of " + std::to_string(nev) + " after " +
                      std::to_string(iparam[2]) + " restarts");

  std::vector<a_int> select(static_cast<std::size_t>(ncv));
  std::vector<Complex> d(static_cast<std::size_t>(nev) + 1), z(static_cast<std::size_t>(n) * nev),
      workev(2 * static_cast<std::size_t>(ncv));
  a_int info_e = 0;
  arpack::neupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, Complex(sigma),
                workev.data(), arpack::bmat::generalized, n, arpack::which::largest_magnitude, nev, opts.tol,
                resid.data(), ncv, v.data(), n, iparam.data(), ipntr.data(), workd.data(), workl.data(),
                lworkl, rwork.data(), info_e);
  if (info_e != 0) throw SolverError("eigensolver: zneupd info = " + std::to_string(info_e));

  const int got = static_cast<int>(iparam[4]);
  std::vector<double> values;
  CMatrix vectors(n, got);
  for (int i = 0; i < got; ++i) {
    values.push_back(d[i].real());
    vectors.col(i) = Eigen::Map<CVector>(z.data() + static_cast<std::size_t>(i) * n, n);
  }
  return sort_and_normalize(std::move(values), std::move(vectors), M);
}

int count_eigenvalues_below(const SpMatrix& A, const SpMatrix& M, double sigma) {
  SpMatrix shifted = A - Complex(sigma) * M;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SpMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) return -1;
  const auto& D = ldlt.vectorD();
  int negative = 0;
  const double scale = D.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    const double dv = D[i].real();
    if (!std::isfinite(dv) || std::abs(dv) <= 1e-14 * scale) return -1;
    if (dv < 0.0) ++negative;
  }
  return negative;
}

EigenPairs smallest_hermitian_eigs(const SpMatrix& A, const SpMatrix& M, int nev, double guess,
                                   const ShiftInvertOptions& opts) {
  double sigma = guess;
  double step = std::max(1.0, std::abs(guess));
  for (int attempt = 0; attempt < 60; ++attempt) {
    const int below = count_eigenvalues_below(A, M, sigma);
    if (below == 0) return hermitian_eigs_near(A, M, sigma, nev, opts);
    sigma -= step;
    step *= 2.0;
  }
  throw SolverError("eigensolver: no lower bound for the spectrum found");
}

}  // namespace bandgap
