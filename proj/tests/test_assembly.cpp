#include <doctest.h>

#include <cmath>

#include "bandgap/assembly.hpp"
#include "bandgap/sparse_eigen.hpp"

using namespace bandgap;

namespace {

double sum_entries(const SpMatrix& A) {
  Complex s = 0.0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMatrix::InnerIterator it(A, c); it; ++it) s += it.value();
  return s.real();
}

}  // namespace

TEST_CASE("mass matrix integrates rho") {
  const auto spec = homogeneous_medium();
  const auto single = build_rect_mesh({0.0, 1.0}, {0.0, 1.0});
  const auto p1 = assemble_quasiperiodic(single, [](double, double) { return 1.0; }, QuasiMomentum(0.0, 1.0));
  CHECK(sum_entries(p1.M) == doctest::Approx(1.0).epsilon(1e-14));

  const auto cell = build_cell_mesh(builtin_bump_medium(), 0.05);
  const auto p = assemble_quasiperiodic(cell, builtin_bump_medium(), QuasiMomentum(0.0, 1.0), Region::BulkCell);
  // 1 + 16 * pi * 0.04, the Gaussian mass inside the unit cell (tails beyond it are below 1e-5).
  CHECK(sum_entries(p.M) == doctest::Approx(1.0 + 16 * M_PI * 0.04).epsilon(2e-3));
  CHECK(std::abs(sum_entries(p.K)) < 1e-12);
}

TEST_CASE("pencils are Hermitian and conjugate in beta") {
  const auto spec = builtin_bump_medium();
  const auto cell = build_cell_mesh(spec, 0.1);
  const auto a = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.7, 1.0), Region::BulkCell);
  const auto b = assemble_quasiperiodic(cell, spec, QuasiMomentum(-0.7, 1.0), Region::BulkCell);
  CHECK(hermitian_defect(a.K) < 1e-13);
  CHECK(hermitian_defect(a.M) < 1e-13);
  CHECK((SpMatrix(a.K - SpMatrix(b.K.conjugate()))).norm() < 1e-12 * a.K.norm());
  CHECK((SpMatrix(a.M - SpMatrix(b.M.conjugate()))).norm() < 1e-12 * a.M.norm());
  CHECK(a.n_dof == 11 * 10);
  CHECK(a.left_dofs.size() == 10);

  const auto real = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.0, 1.0), Region::BulkCell);
  for (int c = 0; c < real.K.outerSize(); ++c)
    for (SpMatrix::InnerIterator it(real.K, c); it; ++it) CHECK(it.value().imag() == 0.0);
}

TEST_CASE("trace restriction") {
  const auto spec = homogeneous_medium();
  const auto cell = build_cell_mesh(spec, 0.1);
  const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.3, 1.0), Region::BulkCell);
  const CVector one = interpolate(cell, p, [](double, double) { return Complex(1.0); });
  const CVector t = restrict_to(one, trace_restriction(p, Edge::G0));
  CHECK((t - CVector::Ones(t.size())).norm() < 1e-14);

  const CVector yv = interpolate(cell, p, [](double, double y) { return Complex(y); });
  const CVector ty = restrict_to(yv, trace_restriction(p, Edge::G0));
  for (Eigen::Index i = 0; i < ty.size(); ++i) CHECK(ty(i).real() == doctest::Approx(-0.5 + 0.1 * i));

  const CVector round = restrict_to(prolong(ty, p.right_dofs, p.n_dof), p.right_dofs);
  CHECK((round - ty).norm() == 0.0);
}

TEST_CASE("periodic Fourier eigenvalues converge at second order") {
  const auto spec = homogeneous_medium();
  double prev_err = 0.0;
  for (double h : {0.1, 0.05}) {
    const auto cell = build_cell_mesh(spec, h);
    const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.0, 1.0), Region::BulkCell, 0.0);
    const auto ev = hermitian_eigs_near(p.K, p.M, -1.0, 6);
    CHECK(std::abs(ev.values[0]) < 1e-9);
    for (int i = 1; i <= 4; ++i) CHECK(ev.values[i] == doctest::Approx(ev.values[1]).epsilon(1e-9));
    CHECK(ev.values[5] > ev.values[4] + 1.0);
    const double err = ev.values[1] - 4 * M_PI * M_PI;
    CHECK(err > 0.0);
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
}

TEST_CASE("inertia count") {
  const auto spec = homogeneous_medium();
  const auto cell = build_cell_mesh(spec, 0.1);
  const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.0, 1.0), Region::BulkCell, 0.0);
  CHECK(count_eigenvalues_below(p.K, p.M, -0.5) == 0);
  CHECK(count_eigenvalues_below(p.K, p.M, 20.0) == 1);
  CHECK(count_eigenvalues_below(p.K, p.M, 50.0) == 5);
  const auto s = smallest_hermitian_eigs(p.K, p.M, 3, 10.0);
  CHECK(std::abs(s.values[0]) < 1e-9);
}
