#pragma once

#include <cstddef>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
};

/// Ordinary least squares of y against x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// p-th percentile (p in [0, 100]) by linear interpolation of the sorted data.
double percentile(std::vector<double> data, double p);

/// Solves a tridiagonal system in place (Thomas algorithm).
/// lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs);

/// log2(e_coarse / e_fine): the observed convergence order of one halving.
double observed_order(double e_coarse, double e_fine);

}  // namespace hardylab
