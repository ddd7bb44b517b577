#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bandgap/io.hpp"
#include "bandgap/modes.hpp"

using namespace bandgap;

TEST_CASE("decay rate of synthetic norms") {
  std::vector<double> plus, minus;
  for (int n = 1; n <= 8; ++n) {
    plus.push_back(3.0 * std::exp(-0.7 * n));
    minus.push_back(0.2 * std::exp(-0.7 * n));
  }
  plus[0] = 100.0;  // near field is ignored
  CHECK(decay_rate(plus, minus, 1.0, 1.0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(decay_rate(plus, minus, 1.0, 2.0) == doctest::Approx(0.35).epsilon(1e-12));
  std::vector<double> tiny{1.0, 1e-20, 1e-21};
  CHECK(decay_rate(tiny, tiny, 1.0, 1.0) == 0.0);
}

TEST_CASE("single Fourier trace in a homogeneous half-guide") {
  const double beta = M_PI / 2, alpha2 = 0.5, h = 1.0 / 40;
  const double gamma = 1.4026407595219596;
  HalfGuide hg(homogeneous_medium(), h, Side::Plus);
  const auto ev = hg.evaluate(beta, alpha2);
  REQUIRE(ev.in_gap());
  CVector phi(hg.mesh().ny());
  for (int j = 0; j < phi.size(); ++j) phi(j) = std::exp(Complex(0.0, beta * hg.mesh().ys[j]));
  const auto f = propagate(ev, phi, 6, Side::Plus);
  REQUIRE(f.fields.size() == 6);
  CHECK(decay_rate(f.norms, {}, f.norms[0], 1.0) == doctest::Approx(gamma).epsilon(2e-3));
  for (double m : f.flux_mismatch) CHECK(m < 1e-10);

  // Cell 2 against e^{-gamma (x - a)} e^{i beta y}.
  const auto nodal = nodal_values(ev.pencil, f.fields[1]);
  double worst = 0.0;
  for (int n = 0; n < hg.mesh().num_nodes(); ++n) {
    const double x = hg.mesh().x(n) + 1.0, y = hg.mesh().y(n);
    const Complex exact = std::exp(-gamma * (x - 0.5)) * std::exp(Complex(0.0, beta * y));
    worst = std::max(worst, std::abs(nodal(n) - exact) / std::exp(-gamma * (x - 0.5)));
  }
  CHECK(worst < 2e-3);

  // Cell fields solve the discrete Helmholtz equation away from the cell edges.
  SpMatrix A = ev.pencil.K - alpha2 * ev.pencil.M;
  const CVector r = A * f.fields[2];
  std::vector<bool> edge(ev.pencil.n_dof, false);
  for (int d : ev.pencil.left_dofs) edge[d] = true;
  for (int d : ev.pencil.right_dofs) edge[d] = true;
  double res = 0.0;
  for (int d = 0; d < ev.pencil.n_dof; ++d)
    if (!edge[d]) res = std::max(res, std::abs(r(d)));
  CHECK(res < 1e-10 * (A * f.fields[2]).cwiseAbs().maxCoeff() + 1e-12 * f.fields[2].norm());
}

TEST_CASE("bump crystal mode reconstruction") {
  GuidedModeSolver s(builtin_bump_medium(), 1.0 / 20);
  const auto roots = s.fixed_point_solve(0.5, {2.1, 5.3}, 1, 1);
  REQUIRE(roots.size() == 1);
  const auto f = reconstruct(s, roots[0], 8);
  CHECK(f.total_norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.interface_jump < 1e-6);
  CHECK(f.decay_rate > 0.5);
  CHECK(f.decay_rate == doctest::Approx(-std::log(f.spectral_radius_plus)).epsilon(0.05));
  for (int n = 2; n < 8; ++n) {
    CHECK(f.plus.norms[n] <= f.plus.norms[n - 1] * (1 + 1e-8));
    CHECK(f.minus.norms[n] <= f.minus.norms[n - 1] * (1 + 1e-8));
  }
  CHECK(f.plus.norms[7] < 1e-2 * f.strip_norm);

  // Continuity across the strip edge and quasi-periodic extension.
  CHECK(std::abs(f(0.5 - 1e-9, 0.13) - f(0.5 + 1e-9, 0.13)) < 1e-6);
  CHECK(std::abs(f(-1.5 - 1e-9, -0.2) - f(-1.5 + 1e-9, -0.2)) < 1e-6);
  const Complex u = f(0.8, 0.1), v = f(0.8, 1.1);
  CHECK(std::abs(std::abs(u) - std::abs(v)) < 1e-12);
  CHECK(std::arg(v / u) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(f(9.0, 0.0) == Complex(0.0));

  const auto r = extend_band(f, 1, 0.1);
  CHECK(r.nx == 171);
  CHECK(r.ny == 31);
  for (int i = 0; i < r.nx; i += 17) CHECK(std::abs(r.at(i, 20) - std::exp(Complex(0, 0.5)) * r.at(i, 10)) < 1e-12);
  std::stringstream ss;
  write_field(ss, r);
  const auto back = read_field(ss);
  CHECK(back.nx == r.nx);
  CHECK(back.omega2 == r.omega2);
  for (std::size_t k = 0; k < r.values.size(); k += 97) CHECK(back.values[k] == r.values[k]);
}

TEST_CASE("beta = 0 extension is periodic") {
  GuidedModeSolver s(builtin_bump_medium(), 0.1);
  const auto ev = s.evaluate(0.0, 3.0);
  REQUIRE(ev->in_gap());
  DispersionPoint p;
  p.omega2 = 3.0;
  const auto f = reconstruct(s, p, 4);
  CHECK(std::abs(f(0.3, 0.2) - f(0.3, 1.2)) < 1e-12);
  CHECK(std::abs(f(-2.3, -0.4) - f(-2.3, 2.6)) < 1e-12);
}
