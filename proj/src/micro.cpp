#include "homog/micro.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace homog {

std::vector<std::string> ReactionSpec::validate(unsigned seed) const {
  std::vector<std::string> warnings;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 1e-3);
  auto probe = [&](const RealFunction& g, const char* name) {
    const double lo = delta0 * (1.0 - 1e-6), hi = delta1 * (1.0 + 1e-6);
    for (int i = -30; i < 30; ++i) {
      double z = 0.1 * i + jitter(rng);
      double dz = 1e-6;
      double q = (g(z + dz) - g(z)) / dz;
      if (q < lo || q > hi) {
        std::ostringstream msg;
        msg << name << " difference quotient " << q << " at z = " << z
            << " outside declared bounds [" << delta0 << ", " << delta1 << "]";
        warnings.push_back(msg.str());
      }
    }
  };
  if (R) probe(R, "R");
  if (S) probe(*S, "S");
  return warnings;
}

Stabilization choose_stabilization(double alpha, double beta, double delta0,
                                   double delta1, double epsilon) {
  if (delta0 <= 0) throw std::invalid_argument("delta0 must be positive");
  if (delta1 < delta0) throw std::invalid_argument("delta1 must be >= delta0");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  double ea = std::pow(epsilon, alpha), eb = std::pow(epsilon, beta);
  Stabilization s;
  if (alpha <= beta) {
    s.L = delta1 * ea + delta0 * (ea - eb);
    s.M = delta1 * ea;
  } else {
    s.L = delta1 * eb;
    s.M = delta1 * eb + delta0 * (eb - ea);
  }
  if (s.L <= 0 || s.M <= 0)
    throw std::invalid_argument(
        "stabilization constants nonpositive (epsilon > 1 with distinct scalings)");
  return s;
}

double contraction_factor(double L, double M, double delta0, double alpha,
                          double beta, double epsilon) {
  double ea = std::pow(epsilon, alpha), eb = std::pow(epsilon, beta);
  double num_l = L - delta0 * eb;
  double num_m = M - delta0 * ea;
  double den_l = L + delta0 * eb;
  double den_m = M + delta0 * ea;
  double worst = std::max({num_l / den_l, num_l / den_m, num_m / den_m, num_m / den_l});
  worst = std::max(worst, 0.0);
  double eta = std::sqrt(worst);
  if (eta >= 1.0) {
    std::ostringstream msg;
    msg << "contraction factor " << eta << " >= 1: stabilization condition violated "
        << "(L = " << L << ", M = " << M << ", delta0 = " << delta0 << ")";
    throw std::invalid_argument(msg.str());
  }
  return eta;
}

double contraction_factor_volume_only(double M, double delta0, double alpha,
                                      double epsilon) {
  double ea = std::pow(epsilon, alpha);
  double worst = std::max((M - delta0 * ea) / (M + delta0 * ea), 0.0);
  double eta = std::sqrt(worst);
  if (eta >= 1.0)
    throw std::invalid_argument("volume contraction factor >= 1 (M too small)");
  return eta;
}

ScalingConfig ScalingConfig::make(double epsilon, double alpha, double beta,
                                  const ReactionSpec& reactions) {
  ScalingConfig cfg;
  cfg.epsilon = epsilon;
  cfg.alpha = alpha;
  cfg.beta = beta;
  if (reactions.has_surface()) {
    Stabilization s =
        choose_stabilization(alpha, beta, reactions.delta0, reactions.delta1, epsilon);
    cfg.L = s.L;
    cfg.M = s.M;
    cfg.eta = contraction_factor(s.L, s.M, reactions.delta0, alpha, beta, epsilon);
  } else {
    cfg.L = 0.0;
    cfg.M = reactions.delta1 * std::pow(epsilon, alpha);
    cfg.eta = contraction_factor_volume_only(cfg.M, reactions.delta0, alpha, epsilon);
  }
  return cfg;
}

MicroSolver::MicroSolver(const Mesh& mesh, const CoefficientField& A,
                         const ScalingConfig& config, const ReactionSpec& reactions,
                         const ScalarField& f, double cg_tol)
    : system_(AssembledSystem::build(mesh, A, f)),
      stiffness_identity_(assemble_stiffness(mesh, CoefficientField::identity())),
      config_(config),
      reactions_(reactions),
      reducer_(mesh.num_vertices(), mesh.tagged_vertices(BoundaryTag::Exterior)),
      cg_tol_(cg_tol) {
  pow_alpha_ = std::pow(config_.epsilon, config_.alpha);
  pow_beta_ = std::pow(config_.epsilon, config_.beta);
  SparseMatrix K = system_.stiffness;
  if (config_.L != 0.0) K += config_.L * system_.mass_surface;
  K += config_.M * system_.mass_volume;
  iteration_matrix_ = reducer_.reduce_matrix(K);
}

IterationRecord MicroSolver::norms_of(const Eigen::VectorXd& v) const {
  IterationRecord r;
  r.l2_volume = std::sqrt(std::max(0.0, v.dot(system_.mass_volume * v)));
  r.l2_surface = std::sqrt(std::max(0.0, v.dot(system_.mass_surface * v)));
  r.h1_semi = std::sqrt(std::max(0.0, v.dot(stiffness_identity_ * v)));
  double scale = pow_alpha_ + pow_beta_;
  r.w_norm = std::sqrt(r.h1_semi * r.h1_semi +
                       scale * (r.l2_volume * r.l2_volume + r.l2_surface * r.l2_surface));
  return r;
}

double MicroSolver::contraction_norm(const IterationRecord& r) const {
  if (reactions_.has_surface())
    return std::sqrt(r.l2_volume * r.l2_volume + r.l2_surface * r.l2_surface);
  return r.l2_volume;
}

Eigen::VectorXd MicroSolver::step(const Eigen::VectorXd& u_prev) const {
  Eigen::VectorXd rhs = system_.load;
  rhs += config_.M * (system_.mass_volume * u_prev);
  rhs -= pow_alpha_ * (system_.mass_volume * u_prev.unaryExpr(reactions_.R));
  if (reactions_.has_surface()) {
    rhs += config_.L * (system_.mass_surface * u_prev);
    rhs -= pow_beta_ * (system_.mass_surface * u_prev.unaryExpr(*reactions_.S));
  }
  Eigen::VectorXd guess = reducer_.reduce_vector(u_prev);
  CgResult cg = cg_solve(iteration_matrix_, reducer_.reduce_vector(rhs), cg_tol_,
                         20000, &guess);
  if (!cg.converged)
    throw std::runtime_error("linearized step: CG stalled at relative residual " +
                             std::to_string(cg.final_residual));
  return reducer_.extend(cg.x);
}

MicroSolution MicroSolver::solve(double tol_fixpoint, int max_iter) const {
  MicroSolution sol;
  sol.trace.eta = config_.eta;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system_.load.size());
  double prev_norm = 0.0;
  bool converged = false;

  for (int k = 1; k <= max_iter; ++k) {
    Eigen::VectorXd u_next = step(u);
    IterationRecord rec = norms_of(u_next - u);
    double cnorm = contraction_norm(rec);
    rec.ratio = (k >= 2 && prev_norm > 0.0) ? cnorm / prev_norm : 0.0;
    prev_norm = cnorm;
    sol.trace.steps.push_back(rec);
    u = u_next;
    if (rec.w_norm <= tol_fixpoint) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "fixed-point loop exceeded " << max_iter << " iterations; observed ratios";
    int n = sol.trace.iterations();
    for (int i = std::max(1, n - 4); i < n; ++i)
      msg << " " << sol.trace.steps[i].ratio;
    msg << " vs eta = " << config_.eta;
    throw std::runtime_error(msg.str());
  }

  // Residual of the nonlinear weak form tested against all interior basis
  // functions, measured as the scaled norm of one further correction.
  for (int round = 0;; ++round) {
    Eigen::VectorXd residual = system_.stiffness * u;
    residual += pow_alpha_ * (system_.mass_volume * u.unaryExpr(reactions_.R));
    if (reactions_.has_surface())
      residual += pow_beta_ * (system_.mass_surface * u.unaryExpr(*reactions_.S));
    residual -= system_.load;
    CgResult cg =
        cg_solve(iteration_matrix_, reducer_.reduce_vector(residual), cg_tol_, 20000);
    sol.trace.residual_w_norm = norms_of(reducer_.extend(cg.x)).w_norm;
    if (sol.trace.residual_w_norm <= 10.0 * tol_fixpoint) break;
    if (round >= 10)
      throw std::runtime_error("nonlinear residual " +
                               std::to_string(sol.trace.residual_w_norm) +
                               " did not reach 10 * tol_fixpoint");
    Eigen::VectorXd u_next = step(u);
    IterationRecord rec = norms_of(u_next - u);
    double cnorm = contraction_norm(rec);
    rec.ratio = prev_norm > 0.0 ? cnorm / prev_norm : 0.0;
    prev_norm = cnorm;
    sol.trace.steps.push_back(rec);
    u = u_next;
  }

  sol.u = u;
  return sol;
}

Eigen::VectorXd MicroSolver::solve_linear_oneshot(double c_vol, double c_surf) const {
  SparseMatrix K = system_.stiffness;
  if (c_surf != 0.0) K += c_surf * system_.mass_surface;
  if (c_vol != 0.0) K += c_vol * system_.mass_volume;
  CgResult cg = cg_solve(reducer_.reduce_matrix(K), reducer_.reduce_vector(system_.load),
                         cg_tol_, 40000);
  if (!cg.converged)
    throw std::runtime_error("one-shot linear solve: CG stalled");
  return reducer_.extend(cg.x);
}

MicroSolution solve_micro(const Mesh& mesh, const CoefficientField& A,
                          const ScalingConfig& config, const ReactionSpec& reactions,
                          const ScalarField& f, double tol_fixpoint, int max_iter) {
  MicroSolver solver(mesh, A, config, reactions, f);
  return solver.solve(tol_fixpoint, max_iter);
}

}  // namespace homog
