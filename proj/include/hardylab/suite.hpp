#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hardylab {

/// Everything a full verification run needs.  All numeric fields must satisfy
/// the preconditions of the operations they feed; r_min is capped at 0.1.
struct RunConfig {
  int n = 3;
  double mu = 0.25;
  double q = 1.2;
  int m_hemisphere = 400;  // angular nodes for the profile solve
  int m_2d = 160;          // angular nodes for the half-ball solves
  int jr = 129;            // radial nodes
  double r_min = 1e-3;
  std::vector<double> k_ladder = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> strong_ladder = {1e2, 1e5, 1e8, 1e11};
  std::string outdir;  // empty: no artifacts
  std::uint64_t seed = 20260810ULL;

  struct Tolerances {
    double exponent_identity = 1e-12;
    double eigen_identity = 1e-12;
    double hemisphere_residual = 1e-8;
    double bound_slack = 1e-9;
    double fit_rel = 0.01;
    double uniqueness_gap = 1e-6;
    double order_min = 1.8;
    double tail_rel = 0.10;
    double ratio_lo = 0.98, ratio_hi = 1.02;
    double ratio_drift = 0.01;
    double monotone_slack = 1e-10;
    double profile_rel = 0.05;
    double stability_lo = 0.8, stability_hi = 1.25;
    double capacity_eps = 1e-12;
  } tol;

  void validate() const;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured values against their thresholds
  double seconds = 0;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// Runs the whole verification battery for one configuration, writing CSV and
/// JSON artifacts when an output directory is set.
Report run_suite(const RunConfig& config);

/// Serializes the report (parameter echo, per-check results) to JSON text.
std::string report_json(const RunConfig& config, const Report& report);

}  // namespace hardylab
