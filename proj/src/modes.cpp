#include "bandgap/modes.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace bandgap {

namespace {

double mass_norm(const SpMatrix& M, const CVector& u) { return std::sqrt(std::max(0.0, (u.adjoint() * (M * u))(0).real())); }

double relative_mismatch(const std::vector<CVector>& terms) {
  CVector sum = CVector::Zero(terms.front().size());
  double scale = 0.0;
  for (const auto& t : terms) {
    sum += t;
    scale += t.norm();
  }
  return scale > 0.0 ? sum.norm() / scale : 0.0;
}

int locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  int i = static_cast<int>(it - grid.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(grid.size()) - 2);
}

}  // namespace

Complex sample_nodal(const StructuredMesh& mesh, const CVector& nodal, double x, double y) {
  x = std::clamp(x, mesh.xs.front(), mesh.xs.back());
  y = std::clamp(y, mesh.ys.front(), mesh.ys.back());
  const int i = locate(mesh.xs, x), j = locate(mesh.ys, y);
  const double s = (x - mesh.xs[i]) / (mesh.xs[i + 1] - mesh.xs[i]);
  const double t = (y - mesh.ys[j]) / (mesh.ys[j + 1] - mesh.ys[j]);
  return (1 - s) * (1 - t) * nodal(mesh.node(i, j)) + s * (1 - t) * nodal(mesh.node(i + 1, j)) +
         s * t * nodal(mesh.node(i + 1, j + 1)) + (1 - s) * t * nodal(mesh.node(i, j + 1));
}

HalfGuideField propagate(const HalfGuideEvaluation& ev, const CVector& phi, int n_rec, Side side) {
  if (n_rec < 1) throw ConfigError("reconstruction needs at least one cell");
  if (!ev.in_gap()) throw SolverError("reconstruction outside a gap");
  const auto& P = ev.propagator().P;
  const auto& T = ev.dtn_set;
  HalfGuideField out;
  out.side = side;
  out.traces.push_back(phi);
  for (int n = 1; n <= n_rec; ++n) out.traces.push_back(P * out.traces.back());
  for (int n = 1; n <= n_rec; ++n) {
    out.fields.push_back(ev.cells.E0 * out.traces[n - 1] + ev.cells.E1 * out.traces[n]);
    out.norms.push_back(mass_norm(ev.pencil.M, out.fields.back()));
  }
  const CMatrix mid = T.T00 + T.T11;
  for (int n = 1; n < n_rec; ++n) {
    out.flux_mismatch.push_back(
        relative_mismatch({T.T01 * out.traces[n - 1], mid * out.traces[n], T.T10 * out.traces[n + 1]}));
  }
  return out;
}

GuidedModeField reconstruct(const GuidedModeSolver& solver, const DispersionPoint& point, int n_rec) {
  const auto ev = solver.evaluate(point.beta, point.omega2);
  if (!ev->in_gap()) throw SolverError("reconstruction: point is not inside a gap");
  const auto& spectrum = *ev->spectrum;
  if (point.branch < 1 || point.branch > static_cast<int>(spectrum.mus.size()))
    throw ConfigError("reconstruction: branch out of range");

  GuidedModeField f;
  f.point = point;
  f.spec = solver.spec();
  f.lx = solver.spec().Lx;
  f.strip_mesh = solver.strip_mesh();
  f.strip_pencil = solver.strip_pencil(point.beta);
  f.u0 = spectrum.vectors.col(point.branch - 1);
  f.phi_plus = restrict_to(f.u0, f.strip_pencil.right_dofs);
  f.phi_minus = restrict_to(f.u0, f.strip_pencil.left_dofs);

  const auto hp = solver.half_guide(Side::Plus).evaluate(point.beta, point.omega2, solver.options().riccati);
  const auto hm = solver.half_guide(Side::Minus).evaluate(point.beta, point.omega2, solver.options().riccati);
  f.cell_mesh_plus = solver.half_guide(Side::Plus).mesh();
  f.cell_mesh_minus = solver.half_guide(Side::Minus).mesh();
  f.cell_pencil_plus = hp.pencil;
  f.cell_pencil_minus = hm.pencil;
  f.spectral_radius_plus = hp.propagator().spectral_radius;
  f.spectral_radius_minus = hm.propagator().spectral_radius;
  f.plus = propagate(hp, f.phi_plus, n_rec, Side::Plus);
  f.minus = propagate(hm, f.phi_minus, n_rec, Side::Minus);

  // Flux balance on the strip traces: the strip residual must be cancelled by the DtN flux.
  const SpMatrix& K0 = f.strip_pencil.K;
  const SpMatrix& M0 = f.strip_pencil.M;
  const CVector r = K0 * f.u0 - point.omega2 * (M0 * f.u0);
  f.interface_jump = std::max(relative_mismatch({restrict_to(r, f.strip_pencil.right_dofs), hp.lambda * f.phi_plus}),
                              relative_mismatch({restrict_to(r, f.strip_pencil.left_dofs), hm.lambda * f.phi_minus}));
  for (double m : f.plus.flux_mismatch) f.interface_jump = std::max(f.interface_jump, m);
  for (double m : f.minus.flux_mismatch) f.interface_jump = std::max(f.interface_jump, m);

  f.strip_norm = mass_norm(M0, f.u0);
  const double scale = 1.0 / f.total_norm();
  f.u0 *= scale;
  f.phi_plus *= scale;
  f.phi_minus *= scale;
  f.strip_norm *= scale;
  for (auto* side : {&f.plus, &f.minus}) {
    for (auto& t : side->traces) t *= scale;
    for (auto& c : side->fields) c *= scale;
    for (auto& n : side->norms) n *= scale;
  }
  f.strip_nodal = nodal_values(f.strip_pencil, f.u0);
  for (const auto& c : f.plus.fields) f.nodal_plus.push_back(nodal_values(f.cell_pencil_plus, c));
  for (const auto& c : f.minus.fields) f.nodal_minus.push_back(nodal_values(f.cell_pencil_minus, c));
  f.decay_rate = decay_rate(f);
  return f;
}

double GuidedModeField::total_norm() const {
  double s = strip_norm * strip_norm;
  for (double n : plus.norms) s += n * n;
  for (double n : minus.norms) s += n * n;
  return std::sqrt(s);
}

Complex GuidedModeField::operator()(double x, double y) const {
  const double ly = spec.Ly;
  const double q = std::floor((y + 0.5 * ly) / ly);
  const double yr = y - q * ly;
  const Complex phase = std::exp(Complex(0.0, point.beta * q * ly));
  const double a = spec.a;
  const int n = n_rec();
  if (std::abs(x) <= a) return phase * sample_nodal(strip_mesh, strip_nodal, x, yr);
  const double xr = std::abs(x) - a;
  const int cell = static_cast<int>(std::floor(xr / lx));
  if (cell >= n) return 0.0;
  const double local = a + (xr - cell * lx);
  if (x > 0) return phase * sample_nodal(cell_mesh_plus, nodal_plus[cell], local, yr);
  return phase * sample_nodal(cell_mesh_minus, nodal_minus[cell], local, yr);
}

double decay_rate(const std::vector<double>& norms_plus, const std::vector<double>& norms_minus, double strip_norm,
                  double lx) {
  // Pool both sides with separate intercepts: center each side, then one slope.
  double sxy = 0.0, sxx = 0.0;
  int used = 0;
  for (const auto* norms : {&norms_plus, &norms_minus}) {
    std::vector<double> xs, ys;
    for (std::size_t k = 1; k < norms->size(); ++k) {  // cells 2..n
      if (!((*norms)[k] > 1e-13 * strip_norm)) break;
      xs.push_back((k + 1) * lx);
      ys.push_back(std::log((*norms)[k]));
    }
    if (xs.size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    used += static_cast<int>(xs.size());
  }
  if (used < 2 || sxx == 0.0) {
    spdlog::warn("decay fit has too few usable cells");
    return 0.0;
  }
  return -sxy / sxx;
}

double decay_rate(const GuidedModeField& field) {
  return decay_rate(field.plus.norms, field.minus.norms, field.strip_norm, field.lx);
}

FieldRaster extend_band(const GuidedModeField& field, int q_bands, double d) {
  if (q_bands < 0 || !(d > 0)) throw ConfigError("extend_band: need q_bands >= 0 and spacing > 0");
  FieldRaster r;
  const double half_w = field.spec.a + field.n_rec() * field.lx;
  const double ly = field.spec.Ly;
  r.beta = field.point.beta;
  r.omega2 = field.point.omega2;
  r.nx = static_cast<int>(std::round(2 * half_w / d)) + 1;
  r.ny = static_cast<int>(std::round((2 * q_bands + 1) * ly / d)) + 1;
  r.x0 = -half_w;
  r.y0 = -(q_bands + 0.5) * ly;
  r.dx = 2 * half_w / (r.nx - 1);
  r.dy = (2 * q_bands + 1) * ly / (r.ny - 1);
  r.values.resize(static_cast<std::size_t>(r.nx) * r.ny);
  for (int j = 0; j < r.ny; ++j)
    for (int i = 0; i < r.nx; ++i) r.values[static_cast<std::size_t>(j) * r.nx + i] = field(r.x0 + i * r.dx, r.y0 + j * r.dy);
  return r;
}

}  // namespace bandgap
