#pragma once

#include <vector>

#include "bandgap/interior.hpp"

namespace bandgap {

/// Solution of one half-guide grown cell by cell from a trace phi:
/// traces[n] = P^n phi for n = 0..n_rec, fields[n-1] lives on cell n.
struct HalfGuideField {
  Side side = Side::Plus;
  std::vector<CVector> traces;
  std::vector<CVector> fields;   // cell-pencil DOFs
  std::vector<double> norms;     // rho-weighted L2 norm per cell
  std::vector<double> flux_mismatch;  // relative, at Gamma_1 .. Gamma_{n_rec - 1}
};

HalfGuideField propagate(const HalfGuideEvaluation& ev, const CVector& phi, int n_rec, Side side);

struct GuidedModeField {
  DispersionPoint point;
  MediumSpec spec;
  double lx = 1.0;
  StructuredMesh strip_mesh;
  StructuredMesh cell_mesh_plus;   // reference cell [a, a + Lx]
  StructuredMesh cell_mesh_minus;  // reflected reference cell
  AssembledPencil strip_pencil;
  AssembledPencil cell_pencil_plus;
  AssembledPencil cell_pencil_minus;
  CVector u0;
  CVector strip_nodal;
  std::vector<CVector> nodal_plus;
  std::vector<CVector> nodal_minus;
  CVector phi_plus;
  CVector phi_minus;
  HalfGuideField plus;
  HalfGuideField minus;
  double strip_norm = 0.0;
  double interface_jump = 0.0;  // max relative flux mismatch, Gamma_0 included
  double decay_rate = 0.0;
  double spectral_radius_plus = 0.0;
  double spectral_radius_minus = 0.0;

  int n_rec() const { return static_cast<int>(plus.fields.size()); }
  /// Field value at a physical point; the quasi-periodic phase is applied
  /// outside the reference band. Zero beyond the reconstructed cells.
  Complex operator()(double x, double y) const;
  /// Total rho-weighted L2 norm over the strip and all reconstructed cells.
  double total_norm() const;
};

/// Rebuilds the guided mode of point (branch point.branch, eigenvector of
/// the strip problem) with n_rec cells on each side, normalized to unit
/// L2(rho) norm over everything reconstructed.
GuidedModeField reconstruct(const GuidedModeSolver& solver, const DispersionPoint& point, int n_rec = 8);

/// Least-squares decay rate (1/length) of the per-cell norms over cells
/// 2..n, both sides pooled with separate intercepts. Norms below 1e-13 of
/// the strip norm end the fit on that side.
double decay_rate(const std::vector<double>& norms_plus, const std::vector<double>& norms_minus,
                  double strip_norm, double lx);
double decay_rate(const GuidedModeField& field);

/// Uniform complex raster.
struct FieldRaster {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double beta = 0.0;
  double omega2 = 0.0;
  std::vector<Complex> values;  // row-major: values[j * nx + i]

  Complex at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

/// Samples the mode over all reconstructed cells and bands q in
/// [-q_bands, q_bands], spacing d in both directions.
FieldRaster extend_band(const GuidedModeField& field, int q_bands, double d);

/// Bilinear interpolation of nodal values on a structured mesh; the point is
/// clamped into the mesh.
Complex sample_nodal(const StructuredMesh& mesh, const CVector& nodal, double x, double y);

}  // namespace bandgap
