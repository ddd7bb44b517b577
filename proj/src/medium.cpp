#include "bandgap/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bandgap {

using nlohmann::json;

double RasterField::operator()(double x, double y) const {
  const int i = std::clamp(static_cast<int>(std::floor((x - x0) / dx)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - y0) / dy)), 0, ny - 1);
  return values[static_cast<std::size_t>(j) * nx + i];
}

ScalarField::ScalarField(double constant)
    : fn_([constant](double, double) { return constant; }),
      description_(std::make_shared<const json>(constant)) {}

ScalarField::ScalarField(Expression expr)
    : description_(std::make_shared<const json>(expr.text())) {
  fn_ = [e = std::move(expr)](double x, double y) { return e(x, y); };
}

ScalarField::ScalarField(RasterField raster) {
  description_ = std::make_shared<const json>(json{
      {"raster", {{"nx", raster.nx}, {"ny", raster.ny}, {"values", raster.values}}}});
  fn_ = [r = std::move(raster)](double x, double y) { return r(x, y); };
}

double wrap_periodic(double t, double L) { return t - L * std::round(t / L); }

double MediumSpec::bulk(double x, double y) const {
  return rho_p(wrap_periodic(x, Lx), wrap_periodic(y, Ly));
}

double MediumSpec::defect(double x, double y) const { return rho_0(x, wrap_periodic(y, Ly)); }

QuasiMomentum::QuasiMomentum(double beta, double Ly) : Ly_(Ly) {
  const double period = 2.0 * std::numbers::pi / Ly;
  double b = beta - period * std::round(beta / period);
  // Half-open (-pi/Ly, pi/Ly]: the left end maps onto the right one.
  if (b <= -0.5 * period) b += period;
  beta_ = b;
}

Complex QuasiMomentum::phase() const { return std::polar(1.0, beta_ * Ly_); }

double eval_rho(const MediumSpec& spec, double x, double y) {
  if (std::abs(x) < spec.a) return spec.defect(x, y);
  return spec.bulk(x, y);
}

MediumSpec builtin_bump_medium() {
  MediumSpec spec;
  spec.rho_p = ScalarField(Expression::parse("1 + 16*exp(-(x^2 + y^2)/0.2^2)"));
  spec.rho_0 = ScalarField(1.0);
  spec.Lx = 1.0;
  spec.Ly = 1.0;
  spec.a = 0.5;
  return spec;
}

MediumSpec homogeneous_medium(double value) {
  MediumSpec spec;
  spec.rho_p = ScalarField(value);
  spec.rho_0 = ScalarField(value);
  return spec;
}

CoefficientBounds sample_bounds(const MediumSpec& spec, int n) {
  CoefficientBounds b{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  auto visit = [&](double v) {
    b.min = std::min(b.min, v);
    b.max = std::max(b.max, v);
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = (i + 0.5) / n;
      const double t = (j + 0.5) / n - 0.5;
      visit(spec.bulk((s - 0.5) * spec.Lx, t * spec.Ly));
      visit(spec.defect((2.0 * s - 1.0) * spec.a, t * spec.Ly));
    }
  }
  return b;
}

void validate_medium(const MediumSpec& spec) {
  if (!(spec.Lx > 0.0) || !(spec.Ly > 0.0)) throw ConfigError("periods Lx, Ly must be positive");
  if (!(spec.a > 0.0)) throw ConfigError("defect half-width a must be positive");
  const auto b = sample_bounds(spec);
  if (!std::isfinite(b.min) || !std::isfinite(b.max))
    throw ConfigError("coefficient is not finite on the sample grid");
  if (!(b.min > 0.0))
    throw ConfigError("coefficient must be bounded below by a positive constant (min sample " +
                      std::to_string(b.min) + ")");
}

namespace {

ScalarField field_from_json(const json& j, double x0, double width, double y0, double height) {
  if (j.is_number()) return ScalarField(j.get<double>());
  if (j.is_string()) return ScalarField(Expression::parse(j.get<std::string>()));
  if (j.is_object() && j.contains("raster")) {
    const json& r = j.at("raster");
    RasterField raster;
    raster.nx = r.at("nx").get<int>();
    raster.ny = r.at("ny").get<int>();
    raster.values = r.at("values").get<std::vector<double>>();
    if (raster.nx <= 0 || raster.ny <= 0 ||
        raster.values.size() != static_cast<std::size_t>(raster.nx) * raster.ny)
      throw ConfigError("raster: values must hold nx*ny entries");
    raster.x0 = x0;
    raster.y0 = y0;
    raster.dx = width / raster.nx;
    raster.dy = height / raster.ny;
    return ScalarField(std::move(raster));
  }
  throw ConfigError("coefficient must be a number, an expression string or a raster object");
}

}  // namespace

MediumSpec medium_from_json(const json& j) {
  MediumSpec spec;
  try {
    if (j.contains("medium")) {
      const auto name = j.at("medium").get<std::string>();
      if (name == "builtin") spec = builtin_bump_medium();
      else if (name == "homogeneous") spec = homogeneous_medium(1.0);
      else throw ConfigError("unknown medium '" + name + "'");
    }
    if (j.contains("Lx")) spec.Lx = j.at("Lx").get<double>();
    if (j.contains("Ly")) spec.Ly = j.at("Ly").get<double>();
    if (j.contains("a")) spec.a = j.at("a").get<double>();
    if (j.contains("rho_p"))
      spec.rho_p = field_from_json(j.at("rho_p"), -0.5 * spec.Lx, spec.Lx, -0.5 * spec.Ly, spec.Ly);
    if (j.contains("rho_0"))
      spec.rho_0 = field_from_json(j.at("rho_0"), -spec.a, 2.0 * spec.a, -0.5 * spec.Ly, spec.Ly);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("medium: ") + e.what());
  }
  validate_medium(spec);
  return spec;
}

json medium_to_json(const MediumSpec& spec) {
  return json{{"rho_p", spec.rho_p.description()},
              {"rho_0", spec.rho_0.description()},
              {"Lx", spec.Lx},
              {"Ly", spec.Ly},
              {"a", spec.a}};
}

}  // namespace bandgap
