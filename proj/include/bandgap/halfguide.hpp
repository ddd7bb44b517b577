#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bandgap/assembly.hpp"

namespace bandgap {

/// Solutions of the two elementary cell problems for every trace basis
/// vector: column j of E0 has trace e_j on the left edge and 0 on the right,
/// E1 the reverse. Both are discrete Helmholtz solutions on interior DOFs.
struct CellSolutions {
  CMatrix E0;
  CMatrix E1;
};

/// Weak trace pairings of the cell solutions with a_C(u, v) =
/// int grad u . conj(grad v) - alpha2 int rho u conj(v):
///   T00 = a(e0, e0), T10 = a(e1, e0), T01 = a(e0, e1), T11 = a(e1, e1)
/// where the first argument carries the column trace.
struct LocalDtNSet {
  CMatrix T00;
  CMatrix T01;
  CMatrix T10;
  CMatrix T11;
  double beta = 0.0;
  double alpha2 = 0.0;

  Eigen::Index n_t() const { return T00.rows(); }
};

/// The same cell seen through x -> -x: the two edges swap roles.
LocalDtNSet mirrored(const LocalDtNSet& T);

enum class CircleClass { Inside, OnCircle, Outside };

struct QepEigenvalue {
  Complex value;  // infinite eigenvalues carry an infinite modulus
  double modulus = 0.0;
  CircleClass where = CircleClass::Inside;
};

struct Propagator {
  CMatrix P;
  std::vector<QepEigenvalue> eigenvalues;
  double spectral_radius = 0.0;
  double riccati_residual = 0.0;  // ||T10 P^2 + (T00+T11) P + T01|| / ||T01||, spectral norms
};

struct InGap {
  Propagator propagator;
};
struct Essential {
  std::vector<Complex> unit_circle_eigenvalues;
  std::vector<QepEigenvalue> eigenvalues;
  double spectral_radius = 1.0;  // largest |lambda| among non-outside eigenvalues
};
struct Degenerate {
  std::string reason;
  std::vector<QepEigenvalue> eigenvalues;
};
using SpectrumVerdict = std::variant<InGap, Essential, Degenerate>;

enum class FrequencyClass { InGap, Essential, Degenerate };
FrequencyClass classify(const SpectrumVerdict& v);
const char* to_string(FrequencyClass c);

struct RiccatiOptions {
  double tol_circle = 1e-6;
  double riccati_tol = 1e-8;
  double basis_cond_max = 1e12;
  double companion_cond_max = 1e8;
};

/// Solves the cell problems for K - alpha2 M with the left/right trace DOFs
/// prescribed. Throws SolverError("cell Dirichlet eigenvalue hit") when the
/// interior block is numerically singular.
CellSolutions solve_cell_problems(const AssembledPencil& cell, double alpha2);

LocalDtNSet local_dtn(const CellSolutions& cells, const AssembledPencil& cell, double alpha2);

/// Spectral solution of T10 X^2 + (T00 + T11) X + T01 = 0 through the
/// linearized quadratic eigenvalue problem; selects the stable root.
SpectrumVerdict solve_riccati(const LocalDtNSet& T, const RiccatiOptions& opts = {});

/// Riccati residual of X relative to ||T01||.
double riccati_residual(const LocalDtNSet& T, const CMatrix& X);

/// Weak DtN matrix T00 + T10 P of the half-guide whose first cell is T.
CMatrix dtn_matrix(const LocalDtNSet& T, const Propagator& P);

enum class Side { Plus, Minus };

struct HalfGuideEvaluation {
  double beta = 0.0;
  double alpha2 = 0.0;
  AssembledPencil pencil;
  CellSolutions cells;
  LocalDtNSet dtn_set;
  SpectrumVerdict verdict;
  CMatrix lambda;  // empty unless in a gap

  bool in_gap() const { return std::holds_alternative<InGap>(verdict); }
  const Propagator& propagator() const { return std::get<InGap>(verdict).propagator; }
};

/// One half-guide B+ (x > a) or B- (x < -a). The minus side is computed as
/// the plus side of the reflected medium rho_p(-x, y); traces are ordered
/// bottom to top on both sides, so no reordering is needed afterwards.
class HalfGuide {
 public:
  HalfGuide(const MediumSpec& spec, double h, Side side);

  Side side() const { return side_; }
  /// First cell [a, a + Lx] x (-Ly/2, Ly/2) (reflected coordinates for Minus).
  const StructuredMesh& mesh() const { return mesh_; }
  AssembledPencil pencil(double beta) const;
  HalfGuideEvaluation evaluate(double beta, double alpha2, const RiccatiOptions& opts = {}) const;

 private:
  MediumSpec spec_;
  StructuredMesh mesh_;
  Side side_;
};

}  // namespace bandgap
