#include "bandgap/supercell.hpp"

#include "bandgap/sparse_eigen.hpp"

namespace bandgap {

SupercellResult supercell_solve(const MediumSpec& spec, double h, double beta, int n_cells, const Interval& gap,
                                int count) {
  if (n_cells < 1) throw ConfigError("supercell: N_cells must be >= 1");
  if (count < 1) throw ConfigError("supercell: count must be >= 1");
  SupercellResult out;
  out.n_cells = n_cells;
  out.beta = beta;
  out.mesh = build_supercell_mesh(spec, h, n_cells);
  out.pencil = assemble_quasiperiodic(out.mesh, spec, QuasiMomentum(beta, spec.Ly), Region::FullMedium, 0.0);
  const auto pairs = hermitian_eigs_near(out.pencil.K, out.pencil.M, gap.mid(), count);
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < pairs.values.size(); ++i) {
    if (gap.contains_open(pairs.values[i])) {
      out.eigenvalues.push_back(pairs.values[i]);
      keep.push_back(static_cast<Eigen::Index>(i));
    }
  }
  out.vectors.resize(out.pencil.n_dof, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.vectors.col(c) = pairs.vectors.col(keep[c]);
  return out;
}

}  // namespace bandgap
