#pragma once

#include <vector>

#include "bandgap/assembly.hpp"

namespace bandgap {

struct SupercellResult {
  int n_cells = 0;
  double beta = 0.0;
  std::vector<double> eigenvalues;  // inside the queried gap, ascending
  CMatrix vectors;
  StructuredMesh mesh;
  AssembledPencil pencil;
};

/// Truncates the guide at x = +-(a + n_cells Lx) with periodic conditions in
/// x and returns the eigenvalues inside gap found by shift-invert around its
/// midpoint.
SupercellResult supercell_solve(const MediumSpec& spec, double h, double beta, int n_cells, const Interval& gap,
                                int count = 6);

}  // namespace bandgap
