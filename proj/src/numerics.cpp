#include "hardylab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardylab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw fit_error("linear_fit: need at least two matched points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw fit_error("linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double percentile(std::vector<double> data, double p) {
  if (data.empty()) throw fit_error("percentile: empty data");
  std::sort(data.begin(), data.end());
  const double pos = (p / 100.0) * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= data.size()) return data.back();
  const double w = pos - static_cast<double>(lo);
  return data[lo] * (1.0 - w) + data[lo + 1] * w;
}

void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

double observed_order(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log2(e_coarse / e_fine);
}

}  // namespace hardylab
