#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bandgap/medium.hpp"
#include "bandgap/mesh.hpp"

namespace bandgap {

using Coefficient = std::function<double(double, double)>;

/// Which coefficient a mesh carries.
enum class Region {
  BulkCell,      // rho_p at physical coordinates
  MirroredBulk,  // rho_p(-x, y): the left half-guide seen through x -> -x
  DefectStrip,   // rho_0
  FullMedium,    // eval_rho (supercell)
};

Coefficient region_coefficient(const MediumSpec& spec, Region region);

/// Stiffness/mass pencil after eliminating the top edge into the bottom
/// edge with phase e^{i beta Ly} (and, for Bloch/supercell problems, the
/// right edge into the left edge with phase e^{i k Lx}).
///
/// The reduced basis function of DOF d is sum_n w_n phi_n over the nodes n
/// mapped onto d, so node values are weight_of_node[n] * u[dof_of_node[n]].
/// K_ij = int grad psi_j . conj(grad psi_i), M_ij = int rho psi_j conj(psi_i).
struct AssembledPencil {
  SpMatrix K;
  SpMatrix M;
  std::vector<int> dof_of_node;
  std::vector<Complex> weight_of_node;
  int n_dof = 0;
  double beta = 0.0;
  std::optional<double> k;
  /// Reduced trace DOFs on the left/right edges, bottom to top; empty when
  /// the pencil is periodic in x.
  std::vector<int> left_dofs;
  std::vector<int> right_dofs;

  Eigen::Index size() const { return n_dof; }
};

AssembledPencil assemble_quasiperiodic(const StructuredMesh& mesh, const Coefficient& rho,
                                       const QuasiMomentum& beta,
                                       std::optional<double> k = std::nullopt);

AssembledPencil assemble_quasiperiodic(const StructuredMesh& mesh, const MediumSpec& spec,
                                       const QuasiMomentum& beta, Region region,
                                       std::optional<double> k = std::nullopt);

enum class Edge { G0, G1 };

/// Reduced DOF indices of an x-edge, in the fixed bottom-to-top order.
const std::vector<int>& trace_restriction(const AssembledPencil& pencil, Edge edge);

CVector restrict_to(const CVector& u, const std::vector<int>& selection);
CVector prolong(const CVector& trace, const std::vector<int>& selection, Eigen::Index n_dof);

/// DOF vector of the nodal interpolant of f.
CVector interpolate(const StructuredMesh& mesh, const AssembledPencil& pencil,
                    const std::function<Complex(double, double)>& f);

/// Per-node values of a DOF vector (phases applied on eliminated nodes).
CVector nodal_values(const AssembledPencil& pencil, const CVector& u);

/// Relative Hermitian defect ||A - A^*||_F / ||A||_F.
double hermitian_defect(const SpMatrix& A);

}  // namespace bandgap
