#pragma once

#include <string>
#include <vector>

#include "hardylab/grid.hpp"

namespace hardylab {

/// 17 significant digits, '.' decimal separator, locale-independent.
std::string g17(double x);

/// Writes a CSV file with the mandatory header row; each row formatted via g17.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Field dump rows `r,phi,value`.
void write_field_csv(const std::string& path, const SolutionField& field);

/// Output directory resolution: explicit flag > HARDYLAB_OUTDIR > current dir.
std::string resolve_outdir(const std::string& flag_value);

}  // namespace hardylab
