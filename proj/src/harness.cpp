#include "homog/harness.hpp"

#include "homog/macro.hpp"
#include "homog/micro.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <stdexcept>

namespace homog {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.out_dir);
  fs::path path = fs::path(config.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

void write_field_csv(std::ofstream& out, const Mesh& mesh, const Eigen::VectorXd& u) {
  out << "x1,x2,u\n";
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << format_g6(mesh.vertices[v].x()) << "," << format_g6(mesh.vertices[v].y())
        << "," << format_g6(u[v]) << "\n";
}

Mesh make_macro_mesh(const RunConfig& config) {
  GeometrySpec spec;
  spec.epsilon = 1.0;
  spec.hole_radius = 0.0;
  spec.target_h = config.macro_h;
  return generate_perforated_mesh(spec);
}

struct HomogenizedSetup {
  CellSolution cell;
  Mesh cell_mesh;
  Mesh macro_mesh;
  Eigen::VectorXd u0;
};

HomogenizedSetup solve_homogenized(const RunConfig& config) {
  HomogenizedSetup setup;
  setup.cell_mesh = generate_cell_mesh(config.r, config.cell_h);
  setup.cell = solve_cell(setup.cell_mesh, config.make_coefficient());
  setup.macro_mesh = make_macro_mesh(config);
  MacroProblem problem;
  problem.A_eff = setup.cell.A_eff;
  problem.porosity = setup.cell.porosity;
  problem.f = config.make_source();
  setup.u0 = solve_macro_linear(setup.macro_mesh, problem, config.cg_tol);
  return setup;
}

struct EpsResult {
  SweepRow row;
  double energy = 0.0;       // scaled-norm energy of the solution
  double trace_const = 0.0;  // constant in the discrete trace inequality
};

EpsResult solve_one_eps(const RunConfig& config, double eps,
                        const HomogenizedSetup* homogenized) {
  GeometrySpec spec;
  spec.epsilon = eps;
  spec.hole_radius = config.r;
  spec.target_h = config.micro_target_h(eps);
  Mesh mesh = generate_perforated_mesh(spec);

  ReactionSpec reactions = config.make_reactions();
  ScalingConfig scaling = ScalingConfig::make(eps, config.alpha, config.beta, reactions);
  MicroSolver solver(mesh, config.make_coefficient().rescaled(eps), scaling, reactions,
                     config.make_source(), config.cg_tol);
  MicroSolution sol = solver.solve(config.fixpoint_tol, config.max_iter);

  Eigen::VectorXd diff = sol.u;
  if (homogenized)
    diff -= interpolate_macro_to_micro(homogenized->u0, homogenized->macro_mesh, mesh);

  EpsResult result;
  IterationRecord norms = solver.norms_of(diff);
  result.row.eps = eps;
  result.row.err_l2 = norms.l2_volume;
  result.row.err_h1 = norms.h1_semi;
  result.row.err_surf = norms.l2_surface;
  result.row.rms_l2 = std::sqrt(diff.squaredNorm() / diff.size());
  std::vector<int> hole_vertices = mesh.tagged_vertices(BoundaryTag::Hole);
  if (!hole_vertices.empty()) {
    double s = 0.0;
    for (int v : hole_vertices) s += diff[v] * diff[v];
    result.row.rms_surf = std::sqrt(s / hole_vertices.size());
  }

  IterationRecord u_norms = solver.norms_of(sol.u);
  result.energy = u_norms.w_norm * u_norms.w_norm;
  double denom = u_norms.l2_volume * u_norms.l2_volume +
                 eps * eps * u_norms.h1_semi * u_norms.h1_semi;
  result.trace_const =
      denom > 0 ? eps * u_norms.l2_surface * u_norms.l2_surface / denom : 0.0;
  return result;
}

}  // namespace

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Regime detect_regime(const RunConfig& config) {
  if (config.regime != "auto") {
    if (config.regime == "volume_pos") return Regime::VolumePos;
    if (config.regime == "volume_neg") return Regime::VolumeNeg;
    if (config.regime == "surface_pos") return Regime::SurfacePos;
    if (config.regime == "surface_small") return Regime::SurfaceSmall;
    if (config.regime == "combined_pos") return Regime::CombinedPos;
    if (config.regime == "combined_small") return Regime::CombinedSmall;
    if (config.regime == "combined_neg") return Regime::CombinedNeg;
    throw std::invalid_argument("config key 'scaling.regime': unknown regime '" +
                                config.regime + "'");
  }
  double a = config.alpha, b = config.beta;
  if (config.c2 == 0.0) {
    if (a > 0) return Regime::VolumePos;
    if (a < 0) return Regime::VolumeNeg;
    throw std::invalid_argument(
        "alpha = 0 with a pure volume reaction sits on a regime boundary; set "
        "scaling.regime explicitly");
  }
  if (a < 0 || b < 0) return Regime::CombinedNeg;
  if (a > 0 && b > 1) return Regime::CombinedPos;
  if (a > 0 && b < 1) return Regime::CombinedSmall;
  throw std::invalid_argument(
      "(alpha, beta) sits on a regime boundary (alpha = 0 or beta = 1); set "
      "scaling.regime explicitly");
}

CellSolution cmd_cell(const RunConfig& config, std::ostream& log) {
  Mesh cell_mesh = generate_cell_mesh(config.r, config.cell_h);
  CellSolution sol = solve_cell(cell_mesh, config.make_coefficient());

  auto tensor = open_output(config, "cell_tensor.csv");
  tensor << format_g6(sol.A_eff(0, 0)) << "," << format_g6(sol.A_eff(0, 1)) << "\n"
         << format_g6(sol.A_eff(1, 0)) << "," << format_g6(sol.A_eff(1, 1)) << "\n";
  auto poro = open_output(config, "cell_porosity.csv");
  poro << format_g6(sol.porosity) << "\n";
  auto chi1 = open_output(config, "cell_chi1.csv");
  write_field_csv(chi1, cell_mesh, sol.chi1);
  auto chi2 = open_output(config, "cell_chi2.csv");
  write_field_csv(chi2, cell_mesh, sol.chi2);

  log << "effective tensor [" << format_g6(sol.A_eff(0, 0)) << ", "
      << format_g6(sol.A_eff(0, 1)) << "; " << format_g6(sol.A_eff(1, 0)) << ", "
      << format_g6(sol.A_eff(1, 1)) << "], porosity " << format_g6(sol.porosity)
      << "\n";
  return sol;
}

int cmd_micro(const RunConfig& config, std::ostream& log) {
  double eps = config.eps.front();
  GeometrySpec spec;
  spec.epsilon = eps;
  spec.hole_radius = config.r;
  spec.target_h = config.micro_target_h(eps);
  Mesh mesh = generate_perforated_mesh(spec);

  ReactionSpec reactions = config.make_reactions();
  for (const auto& warning : reactions.validate(config.seed))
    log << "warning: " << warning << "\n";
  ScalingConfig scaling = ScalingConfig::make(eps, config.alpha, config.beta, reactions);
  MicroSolver solver(mesh, config.make_coefficient().rescaled(eps), scaling, reactions,
                     config.make_source(), config.cg_tol);
  MicroSolution sol = solver.solve(config.fixpoint_tol, config.max_iter);

  auto field = open_output(config, "micro_u.csv");
  write_field_csv(field, mesh, sol.u);
  auto trace = open_output(config, "micro_trace.csv");
  trace << "k,dl2_volume,dl2_surface,dh1_semi,dw_norm,ratio\n";
  for (int k = 0; k < sol.trace.iterations(); ++k) {
    const auto& s = sol.trace.steps[k];
    trace << k + 1 << "," << format_g6(s.l2_volume) << "," << format_g6(s.l2_surface)
          << "," << format_g6(s.h1_semi) << "," << format_g6(s.w_norm) << ","
          << format_g6(s.ratio) << "\n";
  }
  log << "eps " << format_g6(eps) << ": " << sol.trace.iterations()
      << " iterations, eta " << format_g6(sol.trace.eta) << ", residual "
      << format_g6(sol.trace.residual_w_norm) << "\n";
  return 0;
}

int cmd_macro(const RunConfig& config, std::ostream& log) {
  HomogenizedSetup setup = solve_homogenized(config);
  auto field = open_output(config, "macro_u0.csv");
  write_field_csv(field, setup.macro_mesh, setup.u0);
  log << "macro field on " << setup.macro_mesh.num_vertices()
      << " vertices, tensor diag [" << format_g6(setup.cell.A_eff(0, 0)) << ", "
      << format_g6(setup.cell.A_eff(1, 1)) << "], porosity "
      << format_g6(setup.cell.porosity) << "\n";
  return 0;
}

SweepResult run_sweep(const RunConfig& config, std::ostream& log) {
  SweepResult result;
  Regime regime = detect_regime(config);
  bool volume_only = config.c2 == 0.0;
  result.compare_to_homogenized =
      regime == Regime::VolumePos || regime == Regime::SurfacePos ||
      regime == Regime::CombinedPos;
  bool surface_headline = volume_only && config.alpha < 0;

  if (surface_headline)
    result.prediction = predicted_surface_rate(config.alpha);
  else
    result.prediction =
        predicted_rate(regime, config.alpha, config.beta, config.theta, config.mu);

  HomogenizedSetup homogenized;
  if (result.compare_to_homogenized) homogenized = solve_homogenized(config);

  std::vector<std::future<EpsResult>> tasks;
  for (double eps : config.eps)
    tasks.push_back(std::async(std::launch::async, solve_one_eps, std::cref(config),
                               eps, result.compare_to_homogenized ? &homogenized
                                                                  : nullptr));
  std::vector<EpsResult> eps_results;
  for (auto& task : tasks) eps_results.push_back(task.get());

  std::vector<std::pair<double, double>> fit_points;
  result.headline = result.compare_to_homogenized
                        ? "err_l2"
                        : (surface_headline ? "err_surf" : "err_l2");
  for (const auto& r : eps_results) {
    result.rows.push_back(r.row);
    fit_points.emplace_back(r.row.eps,
                            surface_headline ? r.row.err_surf : r.row.err_l2);
    log << "eps " << format_g6(r.row.eps) << ": err_l2 " << format_g6(r.row.err_l2)
        << ", err_h1 " << format_g6(r.row.err_h1) << ", err_surf "
        << format_g6(r.row.err_surf) << ", trace-const " << format_g6(r.trace_const)
        << "\n";
  }
  result.fit = fit_rate(fit_points);
  for (const auto& w : result.fit.warnings) log << "warning: " << w << "\n";
  result.passed = result.fit.slope >= 0.8 * result.prediction.dominant;
  return result;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  SweepResult result = run_sweep(config, log);

  auto csv = open_output(config, "sweep.csv");
  csv << "eps,err_l2,err_h1,err_surf,rms_l2,rms_surf,predicted_exponent,fitted_slope\n";
  for (const auto& row : result.rows)
    csv << format_g6(row.eps) << "," << format_g6(row.err_l2) << ","
        << format_g6(row.err_h1) << "," << format_g6(row.err_surf) << ","
        << format_g6(row.rms_l2) << "," << format_g6(row.rms_surf) << ","
        << format_g6(result.prediction.dominant) << "," << format_g6(result.fit.slope)
        << "\n";

  auto dat = open_output(config, "sweep_loglog.dat");
  dat << "# eps " << result.headline << "\n";
  for (size_t i = 0; i < result.rows.size(); ++i) {
    double value = result.headline == "err_surf" ? result.rows[i].err_surf
                                                 : result.rows[i].err_l2;
    dat << format_g6(result.rows[i].eps) << " " << format_g6(value) << "\n";
  }
  auto plot = open_output(config, "sweep_plot.gp");
  plot << "set logscale xy\nset xlabel 'eps'\nset ylabel '" << result.headline
       << "'\nset key left top\nplot 'sweep_loglog.dat' using 1:2 with linespoints "
          "title 'observed', \\\n     x**("
       << format_g6(result.prediction.dominant)
       << ") * " << format_g6(std::exp(result.fit.intercept))
       << " with lines title 'predicted exponent'\n";

  log << "regime " << to_string(result.prediction.regime) << " (" << result.headline
      << "): fitted slope " << format_g6(result.fit.slope) << ", predicted bound "
      << result.prediction.bound << " (dominant exponent "
      << format_g6(result.prediction.dominant) << ")\n";
  log << (result.passed ? "PASS" : "FAIL") << ": slope "
      << format_g6(result.fit.slope) << (result.passed ? " >= " : " < ")
      << "0.8 * " << format_g6(result.prediction.dominant) << "\n";
  return result.passed ? 0 : 2;
}

int cmd_compare(const RunConfig& config, std::ostream& log) {
  double eps = config.eps.front();
  HomogenizedSetup homogenized = solve_homogenized(config);

  GeometrySpec spec;
  spec.epsilon = eps;
  spec.hole_radius = config.r;
  spec.target_h = config.micro_target_h(eps);
  Mesh mesh = generate_perforated_mesh(spec);

  ReactionSpec reactions = config.make_reactions();
  ScalingConfig scaling = ScalingConfig::make(eps, config.alpha, config.beta, reactions);
  MicroSolver solver(mesh, config.make_coefficient().rescaled(eps), scaling, reactions,
                     config.make_source(), config.cg_tol);
  MicroSolution sol = solver.solve(config.fixpoint_tol, config.max_iter);

  Eigen::VectorXd u0_micro =
      interpolate_macro_to_micro(homogenized.u0, homogenized.macro_mesh, mesh);
  Reconstruction rec =
      reconstruct_expansion(homogenized.u0, homogenized.macro_mesh, homogenized.cell,
                            homogenized.cell_mesh, eps, mesh, config.order,
                            config.with_cutoff);
  if (rec.hole_fallbacks > 0)
    log << "warning: " << rec.hole_fallbacks
        << " micro nodes fell in the solid cell part; used nearest liquid vertex\n";

  auto f1 = open_output(config, "compare_u_eps.csv");
  write_field_csv(f1, mesh, sol.u);
  auto f2 = open_output(config, "compare_u0.csv");
  write_field_csv(f2, mesh, u0_micro);
  auto f3 = open_output(config, "compare_reconstruction.csv");
  write_field_csv(f3, mesh, rec.values);
  auto f4 = open_output(config, "compare_difference.csv");
  write_field_csv(f4, mesh, Eigen::VectorXd(sol.u - u0_micro));

  log << "compare at eps " << format_g6(eps) << ": max|u_eps| "
      << format_g6(sol.u.cwiseAbs().maxCoeff()) << ", max|u_eps - u0| "
      << format_g6((sol.u - u0_micro).cwiseAbs().maxCoeff()) << "\n";
  return 0;
}

}  // namespace homog
