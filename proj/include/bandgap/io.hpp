#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandgap/bloch.hpp"
#include "bandgap/modes.hpp"
#include "bandgap/supercell.hpp"

namespace bandgap {

/// Full double precision, 17 significant digits.
std::string fmt17(double v);

/// "# config {...}" followed by "# key value" lines for extra metadata.
void write_header(std::ostream& os, const nlohmann::json& config, const nlohmann::json& extra = {});

void write_bands_csv(std::ostream& os, const BandStructure& bs);
nlohmann::json gaps_json(const BandStructure& bs);

void write_points_csv(std::ostream& os, const std::vector<DispersionPoint>& points);

/// Text raster: one row per grid point (beta index, alpha2 index, beta,
/// alpha2, value, mask).
void write_scan(std::ostream& os, const ScanRaster& r);

/// Header line "nx ny x0 y0 dx dy beta omega2", then ny rows of nx
/// "re im" pairs.
void write_field(std::ostream& os, const FieldRaster& r);
FieldRaster read_field(std::istream& is);

void write_cell_norms_csv(std::ostream& os, const GuidedModeField& f);

struct SupercellRow {
  int n_cells = 0;
  std::vector<double> eigenvalues;
  double reference = 0.0;
};
void write_supercell_csv(std::ostream& os, const std::vector<SupercellRow>& rows);

void write_qep_eigenvalues_csv(std::ostream& os, const std::vector<QepEigenvalue>& ev);

}  // namespace bandgap
