#include "bandgap/halfguide.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace bandgap {

namespace {

double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(A);
  return svd.singularValues()(0);
}

double condition_number(const CMatrix& A) {
  Eigen::JacobiSVD<CMatrix> svd(A);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// zgges selection: eigenvalue alpha/beta strictly inside the unit circle.
lapack_logical inside_unit_circle(const lapack_complex_double* alpha, const lapack_complex_double* beta) {
  return std::abs(*alpha) < std::abs(*beta);
}

struct OrderedQz {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
  CMatrix Z;
  int selected = 0;
};

OrderedQz ordered_qz(CMatrix A, CMatrix B) {
  const auto n = static_cast<lapack_int>(A.rows());
  OrderedQz out;
  out.alpha.resize(static_cast<std::size_t>(n));
  out.beta.resize(static_cast<std::size_t>(n));
  out.Z.resize(n, n);
  CMatrix Q(n, n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_zgges(LAPACK_COL_MAJOR, 'N', 'V', 'S', inside_unit_circle, n, A.data(), n, B.data(), n, &sdim,
                    out.alpha.data(), out.beta.data(), Q.data(), n, out.Z.data(), n);
  // n + 2 and n + 3 report reordering trouble from rounding (typically
  // eigenvalues on the unit circle); the eigenvalues are still valid and the
  // selection count is checked by the caller.
  if (info != 0 && info != n + 2 && info != n + 3) throw SolverError("QZ factorization failed, info = " + std::to_string(info));
  out.selected = static_cast<int>(sdim);
  return out;
}

}  // namespace

FrequencyClass classify(const SpectrumVerdict& v) {
  if (std::holds_alternative<InGap>(v)) return FrequencyClass::InGap;
  if (std::holds_alternative<Essential>(v)) return FrequencyClass::Essential;
  return FrequencyClass::Degenerate;
}

const char* to_string(FrequencyClass c) {
  switch (c) {
    case FrequencyClass::InGap: return "in-gap";
    case FrequencyClass::Essential: return "essential";
    case FrequencyClass::Degenerate: return "degenerate";
  }
  return "?";
}

LocalDtNSet mirrored(const LocalDtNSet& T) {
  return LocalDtNSet{T.T11, T.T10, T.T01, T.T00, T.beta, T.alpha2};
}

CellSolutions solve_cell_problems(const AssembledPencil& cell, double alpha2) {
  const Eigen::Index n = cell.size();
  const auto nt = static_cast<Eigen::Index>(cell.left_dofs.size());
  if (nt == 0 || cell.right_dofs.size() != cell.left_dofs.size())
    throw SolverError("cell problems need a pencil with matched left/right traces");

  // Local numbering: boundary columns are [left..., right...], the rest interior.
  std::vector<Eigen::Index> boundary_pos(static_cast<std::size_t>(n), -1), interior_pos(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 0; j < nt; ++j) {
    boundary_pos[cell.left_dofs[j]] = j;
    boundary_pos[cell.right_dofs[j]] = nt + j;
  }
  Eigen::Index ni = 0;
  std::vector<Eigen::Index> interior_dofs;
  for (Eigen::Index d = 0; d < n; ++d) {
    if (boundary_pos[d] < 0) {
      interior_pos[d] = ni++;
      interior_dofs.push_back(d);
    }
  }

  const SpMatrix A = cell.K - Complex(alpha2) * cell.M;
  std::vector<Triplet> tii, tib;
  for (Eigen::Index c = 0; c < A.outerSize(); ++c) {
    for (SpMatrix::InnerIterator it(A, c); it; ++it) {
      const auto r = it.row();
      const auto col = it.col();
      if (interior_pos[r] < 0) continue;
      if (interior_pos[col] >= 0) tii.emplace_back(interior_pos[r], interior_pos[col], it.value());
      else tib.emplace_back(interior_pos[r], boundary_pos[col], it.value());
    }
  }
  SpMatrix Aii(ni, ni), Aib(ni, 2 * nt);
  Aii.setFromTriplets(tii.begin(), tii.end());
  Aib.setFromTriplets(tib.begin(), tib.end());
  Aii.makeCompressed();

  Eigen::SparseLU<SpMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Aii);
  if (lu.info() != Eigen::Success) throw SolverError("cell Dirichlet eigenvalue hit (singular interior block)");
  const CMatrix rhs = -CMatrix(Aib);
  const CMatrix X = lu.solve(rhs);
  const double rel = (Aii * X - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!X.allFinite() || rel > 1e-8 || X.cwiseAbs().maxCoeff() > 1e10)
    throw SolverError("cell Dirichlet eigenvalue hit (interior solve residual " + std::to_string(rel) + ")");

  CellSolutions s{CMatrix::Zero(n, nt), CMatrix::Zero(n, nt)};
  for (Eigen::Index j = 0; j < nt; ++j) {
    s.E0(cell.left_dofs[j], j) = 1.0;
    s.E1(cell.right_dofs[j], j) = 1.0;
  }
  for (Eigen::Index i = 0; i < ni; ++i) {
    s.E0.row(interior_dofs[i]) = X.row(i).head(nt);
    s.E1.row(interior_dofs[i]) = X.row(i).tail(nt);
  }
  return s;
}

LocalDtNSet local_dtn(const CellSolutions& cells, const AssembledPencil& cell, double alpha2) {
  const SpMatrix A = cell.K - Complex(alpha2) * cell.M;
  const CMatrix AE0 = A * cells.E0;
  const CMatrix AE1 = A * cells.E1;
  LocalDtNSet T;
  T.T00 = cells.E0.adjoint() * AE0;
  T.T10 = cells.E0.adjoint() * AE1;
  T.T01 = cells.E1.adjoint() * AE0;
  T.T11 = cells.E1.adjoint() * AE1;
  T.beta = cell.beta;
  T.alpha2 = alpha2;
  return T;
}

double riccati_residual(const LocalDtNSet& T, const CMatrix& X) {
  const CMatrix R = T.T10 * X * X + (T.T00 + T.T11) * X + T.T01;
  return spectral_norm(R) / std::max(spectral_norm(T.T01), std::numeric_limits<double>::min());
}

SpectrumVerdict solve_riccati(const LocalDtNSet& T, const RiccatiOptions& opts) {
  const Eigen::Index n = T.n_t();
  if (!T.T00.allFinite() || !T.T01.allFinite() || !T.T10.allFinite() || !T.T11.allFinite())
    return Degenerate{"local DtN matrices are not finite", {}};
  const CMatrix S = T.T00 + T.T11;
  const CMatrix I = CMatrix::Identity(n, n);

  CMatrix A = CMatrix::Zero(2 * n, 2 * n);
  CMatrix B = CMatrix::Zero(2 * n, 2 * n);
  // Both linearizations act on z = [v; lambda v].
  if (condition_number(T.T10) < opts.companion_cond_max) {
    const Eigen::PartialPivLU<CMatrix> lu(T.T10);
    A.topRightCorner(n, n) = I;
    A.bottomLeftCorner(n, n) = -lu.solve(T.T01);
    A.bottomRightCorner(n, n) = -lu.solve(S);
    B.setIdentity();
  } else {
    A.topLeftCorner(n, n) = -T.T01;
    A.bottomRightCorner(n, n) = I;
    B.topLeftCorner(n, n) = S;
    B.topRightCorner(n, n) = T.T10;
    B.bottomLeftCorner(n, n) = I;
  }

  const OrderedQz qz = ordered_qz(A, B);

  std::vector<QepEigenvalue> eigs;
  eigs.reserve(static_cast<std::size_t>(2 * n));
  int inside = 0;
  std::vector<Complex> on_circle;
  double radius_nonoutside = 0.0;
  for (std::size_t i = 0; i < qz.alpha.size(); ++i) {
    QepEigenvalue e;
    if (std::abs(qz.beta[i]) == 0.0) {
      e.value = Complex(std::numeric_limits<double>::infinity(), 0.0);
      e.modulus = std::numeric_limits<double>::infinity();
    } else {
      e.value = qz.alpha[i] / qz.beta[i];
      e.modulus = std::abs(e.value);
    }
    if (std::abs(e.modulus - 1.0) <= opts.tol_circle) {
      e.where = CircleClass::OnCircle;
      on_circle.push_back(e.value);
      radius_nonoutside = std::max(radius_nonoutside, e.modulus);
    } else if (e.modulus < 1.0) {
      e.where = CircleClass::Inside;
      ++inside;
      radius_nonoutside = std::max(radius_nonoutside, e.modulus);
    } else {
      e.where = CircleClass::Outside;
    }
    eigs.push_back(e);
  }
  std::stable_sort(eigs.begin(), eigs.end(),
                   [](const QepEigenvalue& a, const QepEigenvalue& b) { return a.modulus < b.modulus; });

  if (!on_circle.empty()) return Essential{std::move(on_circle), std::move(eigs), radius_nonoutside};
  if (inside != n || qz.selected != n)
    return Degenerate{"stable eigenvalue count " + std::to_string(inside) + " differs from trace dimension " +
                          std::to_string(n),
                      std::move(eigs)};

  const CMatrix Z11 = qz.Z.topLeftCorner(n, n);
  const CMatrix Z21 = qz.Z.bottomLeftCorner(n, n);
  if (condition_number(Z11) > opts.basis_cond_max)
    return Degenerate{"propagator basis ill-conditioned", std::move(eigs)};

  Propagator prop;
  prop.P = Z11.transpose().partialPivLu().solve(Z21.transpose()).transpose();
  prop.spectral_radius = radius_nonoutside;
  prop.riccati_residual = riccati_residual(T, prop.P);
  prop.eigenvalues = std::move(eigs);
  if (!(prop.riccati_residual <= opts.riccati_tol))
    return Degenerate{"Riccati residual " + std::to_string(prop.riccati_residual) + " above tolerance",
                      std::move(prop.eigenvalues)};
  return InGap{std::move(prop)};
}

CMatrix dtn_matrix(const LocalDtNSet& T, const Propagator& P) { return T.T00 + T.T10 * P.P; }

HalfGuide::HalfGuide(const MediumSpec& spec, double h, Side side)
    : spec_(spec), mesh_(translated(build_cell_mesh(spec, h), spec.a + 0.5 * spec.Lx)), side_(side) {}

AssembledPencil HalfGuide::pencil(double beta) const {
  return assemble_quasiperiodic(mesh_, spec_, QuasiMomentum(beta, spec_.Ly),
                                side_ == Side::Plus ? Region::BulkCell : Region::MirroredBulk);
}

HalfGuideEvaluation HalfGuide::evaluate(double beta, double alpha2, const RiccatiOptions& opts) const {
  HalfGuideEvaluation ev;
  ev.beta = beta;
  ev.alpha2 = alpha2;
  ev.pencil = pencil(beta);
  ev.cells = solve_cell_problems(ev.pencil, alpha2);
  ev.dtn_set = local_dtn(ev.cells, ev.pencil, alpha2);
  ev.verdict = solve_riccati(ev.dtn_set, opts);
  if (ev.in_gap()) ev.lambda = dtn_matrix(ev.dtn_set, ev.propagator());
  return ev;
}

}  // namespace bandgap
