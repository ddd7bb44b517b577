#include "bandgap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bandgap {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = a + (b - a) * i / n;
  v[n] = b;
  return v;
}

void check_resolution(const MediumSpec& spec, double h) {
  if (!(h > 0.0) || !(h < 0.5 * std::min(spec.Lx, spec.Ly)))
    throw ConfigError("mesh too coarse: need 0 < h < min(Lx, Ly)/2");
}

}  // namespace

int intervals_for(double length, double h) {
  return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
}

StructuredMesh build_rect_mesh(std::vector<double> xs, std::vector<double> ys) {
  StructuredMesh m;
  m.xs = std::move(xs);
  m.ys = std::move(ys);
  const int nx = m.nx();
  const int ny = m.ny();
  m.elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.elements.push_back({m.node(i, j), m.node(i + 1, j), m.node(i + 1, j + 1), m.node(i, j + 1)});
  for (int j = 0; j <= ny; ++j) {
    m.trace_G0.push_back(m.node(0, j));
    m.trace_G1.push_back(m.node(nx, j));
  }
  for (int i = 0; i <= nx; ++i) {
    m.trace_SigT.push_back(m.node(i, 0));
    m.trace_Sig.push_back(m.node(i, ny));
  }
  for (int i = 0; i < nx; ++i) m.h = std::max(m.h, m.xs[i + 1] - m.xs[i]);
  for (int j = 0; j < ny; ++j) m.h = std::max(m.h, m.ys[j + 1] - m.ys[j]);
  return m;
}

StructuredMesh build_cell_mesh(const MediumSpec& spec, double h) {
  check_resolution(spec, h);
  return build_rect_mesh(linspace(-0.5 * spec.Lx, 0.5 * spec.Lx, intervals_for(spec.Lx, h)),
                         linspace(-0.5 * spec.Ly, 0.5 * spec.Ly, intervals_for(spec.Ly, h)));
}

StructuredMesh build_strip_mesh(const MediumSpec& spec, double h) {
  check_resolution(spec, h);
  // Match the cell's x-spacing so the strip and cells share one element size.
  const double hx = spec.Lx / intervals_for(spec.Lx, h);
  const int n0 = std::max(1, static_cast<int>(std::lround(2.0 * spec.a / hx)));
  return build_rect_mesh(linspace(-spec.a, spec.a, n0),
                         linspace(-0.5 * spec.Ly, 0.5 * spec.Ly, intervals_for(spec.Ly, h)));
}

StructuredMesh build_supercell_mesh(const MediumSpec& spec, double h, int n_cells) {
  const StructuredMesh strip = build_strip_mesh(spec, h);
  const int nx = intervals_for(spec.Lx, h);
  std::vector<double> xs;
  for (int c = n_cells; c >= 1; --c) {
    const double left = -spec.a - c * spec.Lx;
    for (int i = 0; i < nx; ++i) xs.push_back(left + spec.Lx * i / nx);
  }
  xs.insert(xs.end(), strip.xs.begin(), strip.xs.end());
  for (int c = 1; c <= n_cells; ++c) {
    const double left = spec.a + (c - 1) * spec.Lx;
    for (int i = 1; i <= nx; ++i) xs.push_back(i == nx ? spec.a + c * spec.Lx : left + spec.Lx * i / nx);
  }
  return build_rect_mesh(std::move(xs), strip.ys);
}

StructuredMesh translated(const StructuredMesh& mesh, double dx) {
  StructuredMesh m = mesh;
  for (double& x : m.xs) x += dx;
  return m;
}

void write_mesh(std::ostream& os, const StructuredMesh& mesh) {
  os << "# nodes " << mesh.num_nodes() << "\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) os << n << ' ' << mesh.x(n) << ' ' << mesh.y(n) << "\n";
  os << "# elements " << mesh.elements.size() << "\n";
  for (const auto& e : mesh.elements) os << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << "\n";
}

}  // namespace bandgap
