#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandgap/expression.hpp"
#include "bandgap/types.hpp"

namespace bandgap {

/// Piecewise-constant coefficient on a uniform nx-by-ny grid covering
/// [x0, x0 + nx*dx] x [y0, y0 + ny*dy]. values[j * nx + i] is the value
/// in column i (x) and row j (y). Points outside are clamped.
struct RasterField {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  std::vector<double> values;

  double operator()(double x, double y) const;
};

/// Scalar coefficient field: a closed-form expression, a raster, or a
/// constant. Immutable and cheap to copy.
class ScalarField {
 public:
  ScalarField() : ScalarField(1.0) {}
  explicit ScalarField(double constant);
  explicit ScalarField(Expression expr);
  explicit ScalarField(RasterField raster);

  double operator()(double x, double y) const { return fn_(x, y); }
  /// Round-trippable description used when echoing configs.
  const nlohmann::json& description() const { return *description_; }

 private:
  std::function<double(double, double)> fn_;
  std::shared_ptr<const nlohmann::json> description_;
};

/// The propagation medium: periodic bulk coefficient rho_p, defect strip
/// coefficient rho_0 on |x| < a.
///
/// rho_p is given on the reference cell (-Lx/2, Lx/2) x (-Ly/2, Ly/2) and
/// extended periodically; rho_0 is given on (-a, a) x (-Ly/2, Ly/2) and
/// extended periodically in y.
struct MediumSpec {
  ScalarField rho_p;
  ScalarField rho_0;
  double Lx = 1.0;
  double Ly = 1.0;
  double a = 0.5;

  /// rho_p at any physical point (periodic wrap in both directions).
  double bulk(double x, double y) const;
  /// rho_0 at any point of the strip (periodic wrap in y).
  double defect(double x, double y) const;
};

/// Quasi-momentum reduced to (-pi/Ly, pi/Ly].
class QuasiMomentum {
 public:
  QuasiMomentum(double beta, double Ly);

  double value() const { return beta_; }
  double period() const { return Ly_; }
  /// Phase factor e^{i beta Ly} linking the top and bottom edges.
  Complex phase() const;

 private:
  double beta_;
  double Ly_;
};

/// Wrap t into [-L/2, L/2].
double wrap_periodic(double t, double L);

/// rho(x, y): rho_0 inside the defect strip |x| < a, rho_p elsewhere.
double eval_rho(const MediumSpec& spec, double x, double y);

/// Gaussian-bump crystal 1 + 16 exp(-(x^2+y^2)/0.2^2) with one bump row
/// removed: Lx = Ly = 1, rho_0 = 1, a = 0.5.
MediumSpec builtin_bump_medium();

/// rho_p = rho_0 = 1, unit periods, a = 0.5.
MediumSpec homogeneous_medium(double value = 1.0);

/// Sampled bounds of rho over the cell and the strip.
struct CoefficientBounds {
  double min = 0.0;
  double max = 0.0;
};
CoefficientBounds sample_bounds(const MediumSpec& spec, int samples_per_axis = 64);

/// Checks periods, half-width and positivity; throws ConfigError.
void validate_medium(const MediumSpec& spec);

/// Parse a medium from JSON. Accepts `"medium": "builtin"` /
/// `"homogeneous"` shortcuts or explicit `rho_p`, `rho_0`, `Lx`, `Ly`, `a`.
/// Coefficients are numbers, expression strings, or raster objects
/// {"raster": {"nx", "ny", "values"}}.
MediumSpec medium_from_json(const nlohmann::json& j);
nlohmann::json medium_to_json(const MediumSpec& spec);

}  // namespace bandgap
