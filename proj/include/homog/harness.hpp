#pragma once

#include "homog/cell.hpp"
#include "homog/config.hpp"
#include "homog/scaling.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace homog {

/// Prints a floating point value with 6 significant digits (the CSV and
/// report format used throughout the harness).
std::string format_g6(double v);

struct SweepRow {
  double eps = 0.0;
  double err_l2 = 0.0;    // mass-weighted volume L2
  double err_h1 = 0.0;    // identity-stiffness seminorm
  double err_surf = 0.0;  // surface-mass L2
  double rms_l2 = 0.0;    // plain RMS over all nodes
  double rms_surf = 0.0;  // plain RMS over hole-boundary nodes
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RatePrediction prediction;
  RateFit fit;
  std::string headline;  // column the slope was fitted on
  bool compare_to_homogenized = false;
  bool passed = false;
};

/// Solves the cell problems and writes tensor/field/porosity artifacts.
CellSolution cmd_cell(const RunConfig& config, std::ostream& log);

/// Solves the microscopic problem at the first epsilon of the list; writes
/// the field and the iteration trace.
int cmd_micro(const RunConfig& config, std::ostream& log);

/// Solves the homogenized limit problem; writes the macro field.
int cmd_macro(const RunConfig& config, std::ostream& log);

/// Epsilon sweep with regime detection, rate fit and PASS/FAIL verdict.
/// Returns 0 on PASS, 2 when the fitted slope misses the predicted rate.
int cmd_sweep(const RunConfig& config, std::ostream& log);
SweepResult run_sweep(const RunConfig& config, std::ostream& log);

/// Side-by-side export of u_eps, the homogenized field, the two-scale
/// reconstruction and their difference at the first epsilon.
int cmd_compare(const RunConfig& config, std::ostream& log);

/// Maps (alpha, beta, c2) onto the convergence regime; honors the explicit
/// override in config.regime. Throws on the ambiguous boundaries
/// (alpha = 0, beta = 1) unless overridden.
Regime detect_regime(const RunConfig& config);

}  // namespace homog
