#include "bandgap/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

#include "bandgap/assembly.hpp"
#include "bandgap/sparse_eigen.hpp"

namespace bandgap {

bool BandStructure::in_band(double omega2) const {
  return std::any_of(bands.begin(), bands.end(), [&](const Interval& b) { return b.contains_closed(omega2); });
}

int BandStructure::gap_index(double omega2) const {
  if (in_band(omega2)) return -1;
  int below = 0;
  for (const auto& b : band_ranges) below += b.hi < omega2 ? 1 : 0;
  return below;
}

double BandStructure::distance_to_edge(double omega2) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& b : bands) {
    d = std::min(d, std::abs(omega2 - b.lo));
    if (b.hi <= cap) d = std::min(d, std::abs(omega2 - b.hi));
  }
  return d;
}

std::vector<double> bloch_eigenvalues(const StructuredMesh& mesh, const MediumSpec& spec, double beta, double k,
                                      int count) {
  if (count < 1) throw ConfigError("bloch: band count must be >= 1");
  const auto pencil = assemble_quasiperiodic(mesh, spec, QuasiMomentum(beta, spec.Ly), Region::BulkCell, k);
  // The operator is nonnegative, so any negative shift lies below the spectrum.
  const auto pairs = hermitian_eigs_near(pencil.K, pencil.M, -1.0, count);
  return pairs.values;
}

std::vector<Interval> merge_intervals(std::vector<Interval> in, double tol) {
  std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : in) {
    if (!out.empty() && iv.lo <= out.back().hi + tol) out.back().hi = std::max(out.back().hi, iv.hi);
    else out.push_back(iv);
  }
  return out;
}

namespace {

// Golden-section search for an extremum of band n over [k_lo, k_hi].
double golden_extremum(const StructuredMesh& mesh, const MediumSpec& spec, double beta, int n, int count,
                       double k_lo, double k_hi, bool maximize, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double k) {
    const double v = bloch_eigenvalues(mesh, spec, beta, k, count)[n];
    return maximize ? -v : v;
  };
  double a = k_lo, b = k_hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  double best = std::min(fc, fd);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
    best = std::min({best, fc, fd});
  }
  return maximize ? -best : best;
}

}  // namespace

BandStructure band_structure(const StructuredMesh& mesh, const MediumSpec& spec, double beta, int k_grid_size,
                             int count, double cap, const BlochOptions& opts) {
  if (k_grid_size < 2) throw ConfigError("bloch: k grid needs at least 2 points");
  BandStructure bs;
  bs.beta = beta;
  bs.cap = cap;
  const double kmax = std::numbers::pi / spec.Lx;
  for (int i = 0; i < k_grid_size; ++i) bs.k_samples.push_back(kmax * i / (k_grid_size - 1));

  for (int pass = 0;; ++pass) {
    bs.omegas.resize(count, k_grid_size);
    for (int i = 0; i < k_grid_size; ++i) {
      const auto ev = bloch_eigenvalues(mesh, spec, beta, bs.k_samples[i], count);
      for (int n = 0; n < count; ++n) bs.omegas(n, i) = ev[n];
    }
    if (bs.omegas.row(count - 1).minCoeff() > cap || pass >= opts.max_band_growth) {
      if (bs.omegas.row(count - 1).minCoeff() <= cap)
        spdlog::warn("bloch: band {} still dips below cap {} at beta {}", count, cap, beta);
      break;
    }
    count += std::max(2, count / 2);
  }

  bs.band_ranges.resize(count);
  for (int n = 0; n < count; ++n) {
    bs.band_ranges[n] = {bs.omegas.row(n).minCoeff(), bs.omegas.row(n).maxCoeff()};
  }

  auto refine = [&](int n, bool maximize) {
    Eigen::Index at = 0;
    if (maximize) bs.omegas.row(n).maxCoeff(&at);
    else bs.omegas.row(n).minCoeff(&at);
    const double lo = bs.k_samples[std::max<Eigen::Index>(0, at - 1)];
    const double hi = bs.k_samples[std::min<Eigen::Index>(k_grid_size - 1, at + 1)];
    const double v = golden_extremum(mesh, spec, beta, n, count, lo, hi, maximize, opts.edge_k_tol);
    if (maximize) bs.band_ranges[n].hi = std::max(bs.band_ranges[n].hi, v);
    else bs.band_ranges[n].lo = std::min(bs.band_ranges[n].lo, v);
  };

  auto rebuild = [&]() {
    bs.bands = merge_intervals(bs.band_ranges, opts.merge_tol);
    bs.gaps.clear();
    double prev = 0.0;
    for (const auto& b : bs.bands) {
      if (b.lo >= cap) break;
      if (b.lo > prev) bs.gaps.push_back({prev, b.lo});
      prev = std::max(prev, b.hi);
    }
    if (prev < cap && bs.band_ranges.back().lo > cap) bs.gaps.push_back({prev, cap});
  };
  rebuild();

  if (opts.refine_edges) {
    // Only edges bounding a gap matter; interior extrema are left as sampled.
    for (const auto& gap : std::vector<Interval>(bs.gaps)) {
      for (int n = 0; n < count; ++n) {
        if (bs.band_ranges[n].hi == gap.lo) refine(n, true);
        if (bs.band_ranges[n].lo == gap.hi && gap.hi < cap) refine(n, false);
      }
    }
    rebuild();
  }
  return bs;
}

}  // namespace bandgap
