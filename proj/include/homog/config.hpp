#pragma once

#include "homog/coefficient.hpp"
#include "homog/fem.hpp"
#include "homog/micro.hpp"

#include <optional>
#include <string>
#include <vector>

namespace homog {

enum class CoefficientKind { Oscillatory, Identity, Laminate, Expression };

/// Harness configuration. Defaults reproduce the reference setup: hole
/// radius 0.4, oscillatory coefficient, f = 1, linear unit reactions,
/// alpha = 1, beta = 2.
struct RunConfig {
  // geometry
  double r = 0.4;
  std::vector<double> eps = {0.25, 0.125, 0.0625, 0.03125};
  double h_div = 8.0;        // micro target_h = eps / h_div
  double cell_h = 1.0 / 128; // cell mesh target_h
  double macro_h = 1.0 / 128;

  // scaling
  double alpha = 1.0;
  double beta = 2.0;
  std::string regime = "auto";

  // reactions R(z) = c1 z, S(z) = c2 z; c2 = 0 disables the surface term
  double c1 = 1.0;
  double c2 = 1.0;
  std::optional<double> delta0;
  std::optional<double> delta1;

  // coefficient
  CoefficientKind coefficient = CoefficientKind::Oscillatory;
  std::string coefficient_expr;
  std::optional<double> gamma_lower;
  std::optional<double> gamma_upper;

  // source
  std::string f = "1";

  // solver
  double cg_tol = 1e-12;
  double fixpoint_tol = 1e-10;
  int max_iter = 400;

  // analysis
  int theta = 2;
  int mu = 0;
  int order = 1;            // reconstruction order for `compare`
  bool with_cutoff = false; // mask the corrector near the outer boundary

  // output
  std::string out_dir = "out";
  unsigned seed = 0;

  void validate() const;  // throws std::invalid_argument naming the key

  double resolved_delta0() const;
  double resolved_delta1() const;
  CoefficientField make_coefficient() const;  // cell coordinates
  ScalarField make_source() const;
  ReactionSpec make_reactions() const;
  double micro_target_h(double epsilon) const { return epsilon / h_div; }
};

/// Parses the sectioned key = value format. Empty input yields the
/// defaults; unknown keys and malformed values are errors naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace homog
