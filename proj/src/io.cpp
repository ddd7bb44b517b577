#include "bandgap/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace bandgap {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

void write_header(std::ostream& os, const nlohmann::json& config, const nlohmann::json& extra) {
  os << "# config " << config.dump() << '\n';
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) os << "# " << k << ' ' << v.dump() << '\n';
}

void write_bands_csv(std::ostream& os, const BandStructure& bs) {
  os << 'k';
  for (Eigen::Index n = 0; n < bs.omegas.rows(); ++n) os << ",omega2_" << n + 1;
  os << '\n';
  for (std::size_t i = 0; i < bs.k_samples.size(); ++i) {
    os << fmt17(bs.k_samples[i]);
    for (Eigen::Index n = 0; n < bs.omegas.rows(); ++n) os << ',' << fmt17(bs.omegas(n, static_cast<Eigen::Index>(i)));
    os << '\n';
  }
}

nlohmann::json gaps_json(const BandStructure& bs) {
  auto gaps = nlohmann::json::array();
  for (const auto& g : bs.gaps)
    gaps.push_back({{"index", bs.gap_index(g.mid())}, {"lo", g.lo}, {"hi", g.hi}, {"upper_is_cap", g.hi >= bs.cap}});
  auto bands = nlohmann::json::array();
  for (const auto& b : bs.bands) bands.push_back({b.lo, b.hi});
  return {{"beta", bs.beta}, {"cap", bs.cap}, {"gaps", gaps}, {"bands", bands}};
}

void write_points_csv(std::ostream& os, const std::vector<DispersionPoint>& points) {
  os << "beta,omega2,m,residual,gap_index,near_edge,multiplicity\n";
  for (const auto& p : points) {
    os << fmt17(p.beta) << ',' << fmt17(p.omega2) << ',' << p.branch << ',' << fmt17(p.residual) << ','
       << p.gap_index << ',' << (p.near_edge ? 1 : 0) << ',' << p.multiplicity << '\n';
  }
}

void write_scan(std::ostream& os, const ScanRaster& r) {
  os << "# mask 0 = in gap, 1 = essential spectrum, 2 = degenerate\n";
  os << "i_beta,i_alpha2,beta,alpha2,log_abs_f,mask\n";
  const std::size_t na = r.alpha2s.size();
  for (std::size_t i = 0; i < r.betas.size(); ++i)
    for (std::size_t j = 0; j < na; ++j)
      os << i << ',' << j << ',' << fmt17(r.betas[i]) << ',' << fmt17(r.alpha2s[j]) << ','
         << fmt17(r.values[i * na + j]) << ',' << r.mask[i * na + j] << '\n';
}

void write_field(std::ostream& os, const FieldRaster& r) {
  os << r.nx << ' ' << r.ny << ' ' << fmt17(r.x0) << ' ' << fmt17(r.y0) << ' ' << fmt17(r.dx) << ' ' << fmt17(r.dy)
     << ' ' << fmt17(r.beta) << ' ' << fmt17(r.omega2) << '\n';
  for (int j = 0; j < r.ny; ++j) {
    for (int i = 0; i < r.nx; ++i) {
      const Complex v = r.at(i, j);
      os << (i ? " " : "") << fmt17(v.real()) << ' ' << fmt17(v.imag());
    }
    os << '\n';
  }
}

FieldRaster read_field(std::istream& is) {
  FieldRaster r;
  std::string line;
  while (is.peek() == '#') std::getline(is, line);
  if (!(is >> r.nx >> r.ny >> r.x0 >> r.y0 >> r.dx >> r.dy >> r.beta >> r.omega2) || r.nx < 1 || r.ny < 1)
    throw ConfigError("field file: bad header");
  r.values.resize(static_cast<std::size_t>(r.nx) * r.ny);
  for (auto& v : r.values) {
    double re = 0, im = 0;
    if (!(is >> re >> im)) throw ConfigError("field file: truncated data");
    v = {re, im};
  }
  return r;
}

void write_cell_norms_csv(std::ostream& os, const GuidedModeField& f) {
  os << "side,n,x_center,norm\n";
  os << "strip,0,0," << fmt17(f.strip_norm) << '\n';
  for (std::size_t n = 0; n < f.plus.norms.size(); ++n) {
    const double xc = f.spec.a + (n + 0.5) * f.lx;
    os << "plus," << n + 1 << ',' << fmt17(xc) << ',' << fmt17(f.plus.norms[n]) << '\n';
    os << "minus," << n + 1 << ',' << fmt17(-xc) << ',' << fmt17(f.minus.norms[n]) << '\n';
  }
}

void write_supercell_csv(std::ostream& os, const std::vector<SupercellRow>& rows) {
  os << "N,eigenvalue,dtn_reference,difference\n";
  for (const auto& r : rows) {
    if (r.eigenvalues.empty()) os << r.n_cells << ",,," << '\n';
    for (double v : r.eigenvalues)
      os << r.n_cells << ',' << fmt17(v) << ',' << fmt17(r.reference) << ',' << fmt17(v - r.reference) << '\n';
  }
}

void write_qep_eigenvalues_csv(std::ostream& os, const std::vector<QepEigenvalue>& ev) {
  os << "re,im,modulus,where\n";
  for (const auto& e : ev) {
    const char* w = e.where == CircleClass::Inside ? "inside" : e.where == CircleClass::OnCircle ? "on" : "outside";
    os << fmt17(e.value.real()) << ',' << fmt17(e.value.imag()) << ',' << fmt17(e.modulus) << ',' << w << '\n';
  }
}

}  // namespace bandgap
