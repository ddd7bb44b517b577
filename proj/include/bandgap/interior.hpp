#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bandgap/bloch.hpp"
#include "bandgap/halfguide.hpp"

namespace bandgap {

/// The first M eigenpairs of the strip operator with DtN boundary terms at
/// one (beta, alpha2).
struct InteriorSpectrum {
  double beta = 0.0;
  double alpha2 = 0.0;
  std::vector<double> mus;
  CMatrix vectors;  // strip DOFs, M_rho0-normalized columns
  double hermiticity_defect = 0.0;
};

struct DispersionPoint {
  double beta = 0.0;
  double omega2 = 0.0;
  int branch = 1;  // 1-based, the m of mu_m
  double residual = 0.0;
  int gap_index = -1;
  bool near_edge = false;
  int multiplicity = 1;
};

struct SolverOptions {
  RiccatiOptions riccati;
  double hermitian_bound = 1e-6;
  double fixed_point_tol = 1e-8;
  double edge_tol = 1e-3;  // relative to the gap width
  int grid_n = 24;
  int max_iterations = 50;
  int mu_count = 4;
  bool cache = true;
};

/// Strip pencil with the DtN matrices folded onto its two trace blocks.
/// Lambda_plus acts on the x = a trace, Lambda_minus on x = -a; both are
/// symmetrized before use.
InteriorSpectrum mu_spectrum(const AssembledPencil& strip, const CMatrix& lambda_plus,
                             const CMatrix& lambda_minus, int count, double hermitian_bound = 1e-6);

/// Everything computed at one (beta, alpha2).
struct FrequencyEvaluation {
  double beta = 0.0;
  double alpha2 = 0.0;
  FrequencyClass plus_class = FrequencyClass::Degenerate;
  FrequencyClass minus_class = FrequencyClass::Degenerate;
  std::string note;
  std::optional<InteriorSpectrum> spectrum;  // set when both sides are in a gap
  double riccati_residual = 0.0;              // max over both sides
  double spectral_radius_plus = 0.0;
  double spectral_radius_minus = 0.0;
  CMatrix P_plus, P_minus;
  CMatrix lambda_plus, lambda_minus;

  FrequencyClass classification() const;
  bool in_gap() const { return spectrum.has_value(); }
  /// mu_m - alpha2, m 1-based.
  double f(int m) const { return spectrum->mus.at(m - 1) - alpha2; }
};

struct ScanRaster {
  std::vector<double> betas;
  std::vector<double> alpha2s;
  // values[i * alpha2s.size() + j]; mask: 0 = value, 1 = essential, 2 = degenerate
  std::vector<double> values;
  std::vector<int> mask;
  int branch = 1;
};

struct SymmetryReport {
  double beta = 0.0;
  double alpha2 = 0.0;
  double evenness = 0.0;      // max_m |mu_m(beta) - mu_m(-beta)| / max(1, |mu_m|)
  double periodicity = 0.0;   // same against beta + 2 pi / Ly
  double hermiticity = 0.0;   // largest recorded defect
  bool applicable = false;
};

/// The nonlinear eigenvalue problem of one medium at one mesh size.
/// Thread safe: evaluations are memoized behind a mutex keyed on the exact
/// bits of (beta, alpha2).
class GuidedModeSolver {
 public:
  GuidedModeSolver(MediumSpec spec, double h, SolverOptions opts = {});

  const MediumSpec& spec() const { return spec_; }
  double h() const { return h_; }
  const SolverOptions& options() const { return opts_; }
  const StructuredMesh& strip_mesh() const { return strip_mesh_; }
  const StructuredMesh& cell_mesh() const { return cell_mesh_; }
  const HalfGuide& half_guide(Side side) const { return side == Side::Plus ? plus_ : minus_; }
  AssembledPencil strip_pencil(double beta) const;

  std::shared_ptr<const FrequencyEvaluation> evaluate(double beta, double alpha2) const;

  /// Roots of mu_m(beta, alpha) = alpha2 inside gap.
  std::vector<DispersionPoint> fixed_point_solve(double beta, const Interval& gap, int m, int gap_index = -1) const;

  /// Roots in every gap of bands, branches 1..max_branch.
  std::vector<DispersionPoint> solve_all(double beta, const BandStructure& bands, int max_branch) const;

  ScanRaster isovalue_scan(const std::vector<double>& betas, const std::vector<double>& alpha2s, int m,
                           int jobs = 1) const;

  SymmetryReport symmetry_check(double beta, double alpha2) const;

  std::size_t cache_size() const;
  /// Snapshot of every memoized evaluation.
  std::vector<std::shared_ptr<const FrequencyEvaluation>> cached() const;
  void clear_cache() const;

 private:
  std::shared_ptr<const FrequencyEvaluation> compute(double beta, double alpha2) const;

  MediumSpec spec_;
  double h_;
  SolverOptions opts_;
  StructuredMesh cell_mesh_;
  StructuredMesh strip_mesh_;
  HalfGuide plus_;
  HalfGuide minus_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const FrequencyEvaluation>> cache_;
};

/// Runs fn(i) for i in [0, n) on up to jobs threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace bandgap
