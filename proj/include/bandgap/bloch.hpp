#pragma once

#include <vector>

#include "bandgap/mesh.hpp"
#include "bandgap/types.hpp"

namespace bandgap {

struct BlochOptions {
  bool refine_edges = true;
  double edge_k_tol = 1e-5;  // golden-section stopping width in k
  double merge_tol = 1e-9;
  int max_band_growth = 4;   // extra passes with more bands when the top band dips below cap
};

/// Floquet-Bloch band data for one quasi-momentum beta.
/// omegas(n, i) is the n-th eigenvalue (omega^2) at k_samples[i].
/// Gaps are open intervals of [0, cap] not covered by any band.
struct BandStructure {
  double beta = 0.0;
  double cap = 0.0;
  std::vector<double> k_samples;
  Eigen::MatrixXd omegas;
  std::vector<Interval> band_ranges;  // per band n: [min_k, max_k] after edge refinement
  std::vector<Interval> bands;        // merged
  std::vector<Interval> gaps;

  bool in_band(double omega2) const;
  /// Index of the gap containing omega2: 0 for the interval below the
  /// lowest band, n for the n-th gap above it; -1 when omega2 is in a band.
  int gap_index(double omega2) const;
  /// Distance from omega2 to the nearest band edge.
  double distance_to_edge(double omega2) const;
};

/// The `count` smallest eigenvalues of the doubly quasi-periodic cell
/// problem (phases e^{i k Lx}, e^{i beta Ly}), ascending.
std::vector<double> bloch_eigenvalues(const StructuredMesh& mesh, const MediumSpec& spec, double beta, double k,
                                      int count);

/// Sweeps k over [0, pi/Lx] (bands are even in k), merges band ranges and
/// lists the gaps below cap. The band count grows automatically until the
/// highest computed band lies above cap everywhere.
BandStructure band_structure(const StructuredMesh& mesh, const MediumSpec& spec, double beta, int k_grid_size,
                             int count, double cap, const BlochOptions& opts = {});

/// Merge closed intervals that overlap or lie within tol of each other.
std::vector<Interval> merge_intervals(std::vector<Interval> in, double tol);

}  // namespace bandgap
