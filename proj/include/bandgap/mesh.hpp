#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "bandgap/medium.hpp"

namespace bandgap {

/// Tensor-product mesh of bilinear quadrilaterals on [xs.front(), xs.back()]
/// x [ys.front(), ys.back()]. Node (i, j) has index j * (nx + 1) + i.
///
/// Edge node lists run in increasing coordinate order and include both
/// corners: trace_G0 (left, x = xs.front()), trace_G1 (right), trace_SigT
/// (bottom) and trace_Sig (top).
struct StructuredMesh {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::array<int, 4>> elements;  // (i,j) (i+1,j) (i+1,j+1) (i,j+1)
  std::vector<int> trace_G0;
  std::vector<int> trace_G1;
  std::vector<int> trace_Sig;
  std::vector<int> trace_SigT;
  double h = 0.0;  // largest element side

  int nx() const { return static_cast<int>(xs.size()) - 1; }
  int ny() const { return static_cast<int>(ys.size()) - 1; }
  int num_nodes() const { return static_cast<int>(xs.size() * ys.size()); }
  int node(int i, int j) const { return j * (nx() + 1) + i; }
  double x(int n) const { return xs[n % (nx() + 1)]; }
  double y(int n) const { return ys[n / (nx() + 1)]; }
  double width() const { return xs.back() - xs.front(); }
  double height() const { return ys.back() - ys.front(); }
};

StructuredMesh build_rect_mesh(std::vector<double> xs, std::vector<double> ys);

/// Number of element columns per period Lx (and rows per Ly) for target h.
int intervals_for(double length, double h);

/// Periodicity cell (-Lx/2, Lx/2) x (-Ly/2, Ly/2). Throws ConfigError
/// "mesh too coarse" unless 0 < h < min(Lx, Ly)/2.
StructuredMesh build_cell_mesh(const MediumSpec& spec, double h);

/// Defect strip (-a, a) x (-Ly/2, Ly/2) with the same y-nodes as the cell.
StructuredMesh build_strip_mesh(const MediumSpec& spec, double h);

/// [-(a + n Lx), a + n Lx] x (-Ly/2, Ly/2): the strip flanked by n cells
/// per side, node-compatible with the strip and cell meshes.
StructuredMesh build_supercell_mesh(const MediumSpec& spec, double h, int n_cells);

StructuredMesh translated(const StructuredMesh& mesh, double dx);

/// Plain-text node/element listing.
void write_mesh(std::ostream& os, const StructuredMesh& mesh);

}  // namespace bandgap
