#include "bandgap/interior.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <spdlog/spdlog.h>

#include "bandgap/sparse_eigen.hpp"

namespace bandgap {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

InteriorSpectrum mu_spectrum(const AssembledPencil& strip, const CMatrix& lambda_plus,
                             const CMatrix& lambda_minus, int count, double hermitian_bound) {
  const auto& right = strip.right_dofs;
  const auto& left = strip.left_dofs;
  if (lambda_plus.rows() != static_cast<Eigen::Index>(right.size()) ||
      lambda_minus.rows() != static_cast<Eigen::Index>(left.size()))
    throw SolverError("interior: DtN size does not match the strip traces");

  std::vector<Triplet> trips;
  trips.reserve(strip.K.nonZeros() + right.size() * right.size() + left.size() * left.size());
  for (int c = 0; c < strip.K.outerSize(); ++c)
    for (SpMatrix::InnerIterator it(strip.K, c); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  auto fold = [&](const CMatrix& L, const std::vector<int>& dofs) {
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j) trips.emplace_back(dofs[i], dofs[j], L(i, j));
  };
  fold(lambda_plus, right);
  fold(lambda_minus, left);
  SpMatrix A(strip.n_dof, strip.n_dof);
  A.setFromTriplets(trips.begin(), trips.end());

  InteriorSpectrum out;
  out.hermiticity_defect = hermitian_defect(A);
  if (out.hermiticity_defect > hermitian_bound)
    throw SolverError("DtN accuracy insufficient: hermiticity defect " + std::to_string(out.hermiticity_defect));
  SpMatrix Ah = SpMatrix(A.adjoint());
  A = 0.5 * (A + Ah);

  count = std::min<int>(count, strip.n_dof);
  // The DtN terms may be negative; start below the smallest Gershgorin-free guess.
  const double guess = -std::max(1.0, lambda_plus.cwiseAbs().rowwise().sum().maxCoeff() +
                                          lambda_minus.cwiseAbs().rowwise().sum().maxCoeff());
  auto pairs = smallest_hermitian_eigs(A, strip.M, count, guess);
  out.mus = std::move(pairs.values);
  out.vectors = std::move(pairs.vectors);
  return out;
}

FrequencyClass FrequencyEvaluation::classification() const {
  if (plus_class == FrequencyClass::Essential || minus_class == FrequencyClass::Essential)
    return FrequencyClass::Essential;
  if (plus_class == FrequencyClass::InGap && minus_class == FrequencyClass::InGap && spectrum)
    return FrequencyClass::InGap;
  return FrequencyClass::Degenerate;
}

GuidedModeSolver::GuidedModeSolver(MediumSpec spec, double h, SolverOptions opts)
    : spec_(std::move(spec)),
      h_(h),
      opts_(opts),
      cell_mesh_(build_cell_mesh(spec_, h)),
      strip_mesh_(build_strip_mesh(spec_, h)),
      plus_(spec_, h, Side::Plus),
      minus_(spec_, h, Side::Minus) {
  if (opts_.fixed_point_tol <= 0 || opts_.edge_tol <= 0 || opts_.hermitian_bound <= 0)
    throw ConfigError("solver tolerances must be positive");
  if (opts_.grid_n < 4) throw ConfigError("fixed-point grid needs at least 4 points");
}

AssembledPencil GuidedModeSolver::strip_pencil(double beta) const {
  return assemble_quasiperiodic(strip_mesh_, spec_, QuasiMomentum(beta, spec_.Ly), Region::DefectStrip);
}

std::shared_ptr<const FrequencyEvaluation> GuidedModeSolver::evaluate(double beta, double alpha2) const {
  const auto key = std::make_pair(std::bit_cast<std::uint64_t>(beta), std::bit_cast<std::uint64_t>(alpha2));
  if (opts_.cache) {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto ev = compute(beta, alpha2);
  if (opts_.cache) {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(key, ev);
  }
  return ev;
}

std::shared_ptr<const FrequencyEvaluation> GuidedModeSolver::compute(double beta, double alpha2) const {
  auto out = std::make_shared<FrequencyEvaluation>();
  out->beta = beta;
  out->alpha2 = alpha2;
  try {
    const auto p = plus_.evaluate(beta, alpha2, opts_.riccati);
    const auto m = minus_.evaluate(beta, alpha2, opts_.riccati);
    out->plus_class = classify(p.verdict);
    out->minus_class = classify(m.verdict);
    if (!p.in_gap() || !m.in_gap()) {
      if (const auto* d = std::get_if<Degenerate>(&p.verdict)) out->note = d->reason;
      else if (const auto* d2 = std::get_if<Degenerate>(&m.verdict)) out->note = d2->reason;
      return out;
    }
    out->riccati_residual = std::max(p.propagator().riccati_residual, m.propagator().riccati_residual);
    out->spectral_radius_plus = p.propagator().spectral_radius;
    out->spectral_radius_minus = m.propagator().spectral_radius;
    out->P_plus = p.propagator().P;
    out->P_minus = m.propagator().P;
    out->lambda_plus = p.lambda;
    out->lambda_minus = m.lambda;
    out->spectrum = mu_spectrum(strip_pencil(beta), p.lambda, m.lambda, opts_.mu_count, opts_.hermitian_bound);
    out->spectrum->beta = beta;
    out->spectrum->alpha2 = alpha2;
  } catch (const SolverError& e) {
    out->plus_class = out->minus_class = FrequencyClass::Degenerate;
    out->spectrum.reset();
    out->note = e.what();
    spdlog::debug("beta {} alpha2 {}: {}", beta, alpha2, e.what());
  }
  return out;
}

std::vector<DispersionPoint> GuidedModeSolver::fixed_point_solve(double beta, const Interval& gap, int m,
                                                                 int gap_index) const {
  if (m < 1 || m > opts_.mu_count) throw ConfigError("branch must lie in 1.." + std::to_string(opts_.mu_count));
  const double margin = opts_.edge_tol * gap.width();
  const double lo = gap.lo + margin, hi = gap.hi - margin;
  std::vector<DispersionPoint> roots;
  if (!(hi > lo)) return roots;

  const int n = opts_.grid_n;
  std::vector<double> xs(n);
  std::vector<std::optional<double>> fs(n);
  for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
  for (int i = 0; i < n; ++i) {
    const auto ev = evaluate(beta, xs[i]);
    if (ev->in_gap()) fs[i] = ev->f(m);
    else spdlog::info("beta {} alpha2 {} skipped: {} {}", beta, xs[i], to_string(ev->classification()), ev->note);
  }

  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    if (!fs[i] || !fs[i + 1]) continue;
    double a = xs[i], b = xs[i + 1], fa = *fs[i], fb = *fs[i + 1];
    std::optional<double> root;
    double froot = 0.0;
    if (fa == 0.0) {
      root = a;
      froot = 0.0;
    } else if (fa * fb < 0.0) {
      // Illinois variant of regula falsi: secant steps kept inside the bracket.
      int side = 0;
      double x = a, fx = fa;
      for (int it = 0; it < opts_.max_iterations; ++it) {
        x = (a * fb - b * fa) / (fb - fa);
        if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        const auto ev = evaluate(beta, x);
        if (!ev->in_gap()) {
          x = 0.5 * (a + b);
          const auto evm = evaluate(beta, x);
          if (!evm->in_gap()) break;
          fx = evm->f(m);
        } else {
          fx = ev->f(m);
        }
        if (std::abs(fx) <= opts_.fixed_point_tol * std::max(1.0, x) || std::abs(b - a) <= 4e-16 * std::abs(x)) break;
        if (fx * fb < 0.0) {
          a = b;
          fa = fb;
          b = x;
          fb = fx;
          side = 0;
        } else {
          b = x;
          fb = fx;
          if (side == 1) fa *= 0.5;
          side = 1;
        }
      }
      root = x;
      froot = fx;
    }
    if (!root) continue;
    if (std::abs(froot) > opts_.fixed_point_tol * std::max(1.0, *root)) {
      spdlog::info("beta {}: bracket [{}, {}] rejected, |f| = {} (pole of the DtN map)", beta, xs[i], xs[i + 1],
                   std::abs(froot));
      continue;
    }
    DispersionPoint p;
    p.beta = beta;
    p.omega2 = *root;
    p.branch = m;
    p.residual = std::abs(froot);
    p.gap_index = gap_index;
    p.near_edge = *root - gap.lo < margin + step || gap.hi - *root < margin + step;
    const auto ev = evaluate(beta, *root);
    p.multiplicity = static_cast<int>(std::count_if(ev->spectrum->mus.begin(), ev->spectrum->mus.end(), [&](double mu) {
      return std::abs(mu - *root) <= 1e-6 * std::max(1.0, *root);
    }));
    roots.push_back(p);
  }
  return roots;
}

std::vector<DispersionPoint> GuidedModeSolver::solve_all(double beta, const BandStructure& bands,
                                                         int max_branch) const {
  std::vector<DispersionPoint> out;
  for (const auto& gap : bands.gaps) {
    const int g = bands.gap_index(gap.mid());
    for (int m = 1; m <= max_branch; ++m) {
      auto r = fixed_point_solve(beta, gap, m, g);
      out.insert(out.end(), r.begin(), r.end());
    }
  }
  std::sort(out.begin(), out.end(), [](const DispersionPoint& x, const DispersionPoint& y) {
    return x.omega2 != y.omega2 ? x.omega2 < y.omega2 : x.branch < y.branch;
  });
  return out;
}

ScanRaster GuidedModeSolver::isovalue_scan(const std::vector<double>& betas, const std::vector<double>& alpha2s,
                                           int m, int jobs) const {
  ScanRaster r;
  r.betas = betas;
  r.alpha2s = alpha2s;
  r.branch = m;
  const std::size_t na = alpha2s.size();
  r.values.assign(betas.size() * na, std::numeric_limits<double>::quiet_NaN());
  r.mask.assign(betas.size() * na, 2);
  parallel_for(static_cast<int>(r.values.size()), jobs, [&](int idx) {
    const auto ev = evaluate(betas[idx / na], alpha2s[idx % na]);
    switch (ev->classification()) {
      case FrequencyClass::InGap:
        r.values[idx] = std::log(std::abs(ev->f(m)));
        r.mask[idx] = 0;
        break;
      case FrequencyClass::Essential:
        r.mask[idx] = 1;
        break;
      case FrequencyClass::Degenerate:
        r.mask[idx] = 2;
        break;
    }
  });
  return r;
}

SymmetryReport GuidedModeSolver::symmetry_check(double beta, double alpha2) const {
  SymmetryReport rep;
  rep.beta = beta;
  rep.alpha2 = alpha2;
  const auto e0 = evaluate(beta, alpha2);
  const auto e1 = evaluate(-beta, alpha2);
  const auto e2 = evaluate(beta + 2.0 * std::numbers::pi / spec_.Ly, alpha2);
  if (!e0->in_gap() || !e1->in_gap() || !e2->in_gap()) return rep;
  rep.applicable = true;
  for (std::size_t k = 0; k < e0->spectrum->mus.size(); ++k) {
    const double mu = e0->spectrum->mus[k];
    const double s = std::max(1.0, std::abs(mu));
    rep.evenness = std::max(rep.evenness, std::abs(mu - e1->spectrum->mus[k]) / s);
    rep.periodicity = std::max(rep.periodicity, std::abs(mu - e2->spectrum->mus[k]) / s);
  }
  rep.hermiticity = std::max({e0->spectrum->hermiticity_defect, e1->spectrum->hermiticity_defect,
                              e2->spectrum->hermiticity_defect});
  return rep;
}

std::size_t GuidedModeSolver::cache_size() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return cache_.size();
}

std::vector<std::shared_ptr<const FrequencyEvaluation>> GuidedModeSolver::cached() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  std::vector<std::shared_ptr<const FrequencyEvaluation>> out;
  for (const auto& [k, v] : cache_) out.push_back(v);
  return out;
}

void GuidedModeSolver::clear_cache() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cache_.clear();
}

}  // namespace bandgap
