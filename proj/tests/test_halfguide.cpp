#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bandgap/halfguide.hpp"

using namespace bandgap;

namespace {

// Nodal trace of e^{i kappa y} in reduced ordering and the periodic 1D trace mass.
CVector fourier_trace(const StructuredMesh& m, double kappa) {
  CVector v(m.ny());
  for (int j = 0; j < m.ny(); ++j) v(j) = std::exp(Complex(0.0, kappa * m.ys[j]));
  return v;
}

double rayleigh(const CMatrix& T, const CVector& v, double hy) {
  // Trace mass of a Fourier mode on a uniform periodic grid: hy * n * (2 + cos(kappa hy)) / 3.
  return (v.adjoint() * T * v)(0).real() / (v.size() * hy);
}

}  // namespace

TEST_CASE("cell problem solutions") {
  const auto spec = homogeneous_medium();
  const auto cell = build_cell_mesh(spec, 0.1);
  const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(0.0, 1.0), Region::BulkCell);
  const auto s = solve_cell_problems(p, 0.0);
  const CVector e0 = s.E0.rowwise().sum();
  const CVector e1 = s.E1.rowwise().sum();
  CHECK((e0 + e1 - CVector::Ones(e0.size())).norm() < 1e-11);
  const auto nodal = nodal_values(p, e0);
  CHECK(nodal(cell.node(5, 3)).real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(nodal(cell.node(2, 7)).real() == doctest::Approx(0.8).epsilon(1e-10));

  // alpha2 < 0 in a homogeneous cell with a constant trace: sinh profile.
  const auto sn = solve_cell_problems(p, -4.0);
  const auto nn = nodal_values(p, CVector(sn.E0.rowwise().sum()));
  CHECK(nn(cell.node(5, 3)).real() == doctest::Approx(std::sinh(1.0) / std::sinh(2.0)).epsilon(5e-3));
}

TEST_CASE("local DtN symbols of a homogeneous cell") {
  const auto spec = homogeneous_medium();
  const double h = 1.0 / 40;
  const auto cell = build_cell_mesh(spec, h);
  const double beta = M_PI / 2, alpha2 = 0.5;
  const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(beta, 1.0), Region::BulkCell);
  const auto T = local_dtn(solve_cell_problems(p, alpha2), p, alpha2);
  const CVector v = fourier_trace(cell, beta);
  // gamma coth(gamma), -gamma / sinh(gamma) for gamma^2 = beta^2 - alpha2.
  CHECK(rayleigh(T.T00, v, h) == doctest::Approx(1.5832569339553265).epsilon(5e-3));
  CHECK(rayleigh(T.T11, v, h) == doctest::Approx(1.5832569339553265).epsilon(5e-3));
  CHECK(rayleigh(T.T01, v, h) == doctest::Approx(-0.73437144460094685).epsilon(5e-3));
  CHECK(rayleigh(T.T10, v, h) == doctest::Approx(-0.73437144460094685).epsilon(5e-3));
  CHECK((T.T00 - T.T11).norm() < 1e-10 * T.T00.norm());
  CHECK((T.T01 - T.T10.adjoint()).norm() < 1e-10 * T.T01.norm());
  const auto mT = mirrored(T);
  CHECK((mT.T00 - T.T11).norm() == 0.0);
  CHECK((mT.T01 - T.T10).norm() == 0.0);
}

TEST_CASE("propagator of a homogeneous half-guide") {
  HalfGuide hg(homogeneous_medium(), 1.0 / 40, Side::Plus);
  const auto ev = hg.evaluate(M_PI / 2, 0.5);
  REQUIRE(ev.in_gap());
  const auto& P = ev.propagator();
  CHECK(P.riccati_residual < 1e-10);
  CHECK(P.spectral_radius == doctest::Approx(0.24594661974024974).epsilon(1e-3));
  Eigen::ComplexEigenSolver<CMatrix> es(P.P);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.rbegin(), mods.rend());
  CHECK(mods[1] == doctest::Approx(0.0094755991289732625).epsilon(0.01));
  CHECK(mods[2] == doctest::Approx(0.00040078482145410850).epsilon(0.03));

  // Lambda acts on a Fourier trace as gamma_0 times the trace mass.
  const CVector v = fourier_trace(hg.mesh(), M_PI / 2);
  CHECK(rayleigh(ev.lambda, v, 1.0 / 40) == doctest::Approx(1.4026407595219596).epsilon(2e-3));
  CHECK(hermitian_defect(SpMatrix(ev.lambda.sparseView())) < 1e-10);
}

TEST_CASE("classification of frequencies") {
  HalfGuide hg(homogeneous_medium(), 0.1, Side::Plus);
  CHECK(classify(hg.evaluate(M_PI / 2, 4.0).verdict) == FrequencyClass::Essential);
  CHECK(classify(hg.evaluate(M_PI / 2, 1.0).verdict) == FrequencyClass::InGap);
  CHECK(std::string(to_string(FrequencyClass::Essential)) == "essential");
  const auto ess = std::get<Essential>(hg.evaluate(M_PI / 2, 4.0).verdict);
  CHECK(!ess.unit_circle_eigenvalues.empty());
  for (const auto& z : ess.unit_circle_eigenvalues) CHECK(std::abs(std::abs(z) - 1.0) < 1e-6);
}

TEST_CASE("stable Riccati root has the smallest spectral radius") {
  HalfGuide hg(builtin_bump_medium(), 0.1, Side::Plus);
  const auto ev = hg.evaluate(0.5, 3.0);
  REQUIRE(ev.in_gap());
  int inside = 0;
  for (const auto& e : ev.propagator().eigenvalues) inside += e.where == CircleClass::Inside ? 1 : 0;
  CHECK(inside == ev.dtn_set.n_t());
  CHECK(ev.propagator().spectral_radius < 1.0);
  CHECK(riccati_residual(ev.dtn_set, ev.propagator().P) < 1e-10);
}

TEST_CASE("minus side equals the mirrored cell") {
  // Asymmetric bulk; with 2a = Lx the minus cell is the reflected plus cell.
  MediumSpec spec = builtin_bump_medium();
  spec.rho_p = ScalarField(Expression::parse("1 + 16*exp(-((x-0.15)^2 + y^2)/0.2^2)"));
  const double beta = 0.5, alpha2 = 3.0;
  HalfGuide minus(spec, 0.1, Side::Minus);
  const auto em = minus.evaluate(beta, alpha2);

  // Direct construction: the physical cell left of the strip, [-a - Lx, -a], whose Gamma_a edge is on the right.
  const auto cell = translated(build_cell_mesh(spec, 0.1), -spec.a - 0.5 * spec.Lx);
  const auto p = assemble_quasiperiodic(cell, spec, QuasiMomentum(beta, 1.0), Region::BulkCell);
  const auto T = mirrored(local_dtn(solve_cell_problems(p, alpha2), p, alpha2));
  REQUIRE(em.in_gap());
  CHECK((em.dtn_set.T00 - T.T00).norm() < 1e-9 * T.T00.norm());
  CHECK((em.dtn_set.T10 - T.T10).norm() < 1e-9 * T.T10.norm());
  const auto verdict = solve_riccati(T);
  REQUIRE(std::holds_alternative<InGap>(verdict));
  const CMatrix lam = dtn_matrix(T, std::get<InGap>(verdict).propagator);
  CHECK((em.lambda - lam).norm() < 1e-8 * lam.norm());

  HalfGuide plus(spec, 0.1, Side::Plus);
  CHECK((plus.evaluate(beta, alpha2).lambda - em.lambda).norm() > 1e-3 * lam.norm());
}
