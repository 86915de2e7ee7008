#include "homog/config.hpp"

#include "homog/expression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace homog {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': malformed number '" +
                              value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  if (std::abs(v - std::lround(v)) > 1e-12)
    throw std::invalid_argument("config key '" + key + "': expected an integer");
  return static_cast<int>(std::lround(v));
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (r < 0 || r >= 0.5)
    throw std::invalid_argument("config key 'geometry.r': must lie in [0, 0.5)");
  if (eps.empty())
    throw std::invalid_argument("config key 'geometry.eps': empty list");
  double last = 2.0;
  for (double e : eps) {
    if (e <= 0 || e >= last)
      throw std::invalid_argument(
          "config key 'geometry.eps': values must be positive and strictly decreasing");
    double inv = 1.0 / e;
    if (std::abs(inv - std::lround(inv)) > 1e-9)
      throw std::invalid_argument("config key 'geometry.eps': 1/eps must be an integer (got eps = " +
                                  std::to_string(e) + ")");
    last = e;
  }
  if (h_div < 8)
    throw std::invalid_argument("config key 'geometry.h_div': must be >= 8");
  if (c1 <= 0)
    throw std::invalid_argument("config key 'reactions.c1': must be positive");
  if (c2 < 0)
    throw std::invalid_argument("config key 'reactions.c2': must be nonnegative");
  if (resolved_delta0() <= 0 || resolved_delta1() < resolved_delta0())
    throw std::invalid_argument(
        "config keys 'reactions.delta0/delta1': need 0 < delta0 <= delta1");
  if (coefficient == CoefficientKind::Expression && coefficient_expr.empty())
    throw std::invalid_argument(
        "config key 'coefficient.expr': required for kind = expression");
  if (theta < 2)
    throw std::invalid_argument("config key 'analysis.theta': must be >= 2");
  if (mu < 0 || mu > theta - 1)
    throw std::invalid_argument("config key 'analysis.mu': must lie in [0, theta-1]");
  if (order != 0 && order != 1)
    throw std::invalid_argument("config key 'analysis.order': must be 0 or 1");
  make_source();  // surfaces parse errors with the key name
}

double RunConfig::resolved_delta0() const {
  if (delta0) return *delta0;
  return c2 > 0 ? std::min(c1, c2) : c1;
}

double RunConfig::resolved_delta1() const {
  if (delta1) return *delta1;
  return c2 > 0 ? std::max(c1, c2) : c1;
}

CoefficientField RunConfig::make_coefficient() const {
  switch (coefficient) {
    case CoefficientKind::Oscillatory: return CoefficientField::oscillatory();
    case CoefficientKind::Identity: return CoefficientField::identity();
    case CoefficientKind::Laminate: return CoefficientField::laminate();
    case CoefficientKind::Expression: {
      auto fn = parse_expression(coefficient_expr);
      double lo, hi;
      if (gamma_lower && gamma_upper) {
        lo = *gamma_lower;
        hi = *gamma_upper;
      } else {
        // Bounds not declared: sample the unit cell and pad.
        lo = 1e300;
        hi = -1e300;
        for (int i = 0; i <= 64; ++i)
          for (int j = 0; j <= 64; ++j) {
            double v = fn(i / 64.0, j / 64.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        lo *= (lo > 0 ? 0.999 : 1.001);
        hi *= 1.001;
      }
      if (lo <= 0)
        throw std::invalid_argument(
            "config key 'coefficient.expr': coefficient must be uniformly positive");
      return CoefficientField::isotropic(
          [fn](const Eigen::Vector2d& y) { return fn(y.x(), y.y()); }, lo, hi);
    }
  }
  throw std::logic_error("unreachable coefficient kind");
}

ScalarField RunConfig::make_source() const {
  std::function<double(double, double)> fn;
  try {
    fn = parse_expression(f);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key 'source.f': " + std::string(e.what()));
  }
  return [fn](const Eigen::Vector2d& x) { return fn(x.x(), x.y()); };
}

ReactionSpec RunConfig::make_reactions() const {
  ReactionSpec spec;
  spec.R = [c = c1](double z) { return c * z; };
  if (c2 > 0) spec.S = [c = c2](double z) { return c * z; };
  spec.delta0 = resolved_delta0();
  spec.delta1 = resolved_delta1();
  return spec;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;

    if (full == "geometry.r") cfg.r = parse_double(full, value);
    else if (full == "geometry.eps") cfg.eps = parse_list(full, value);
    else if (full == "geometry.h_div") cfg.h_div = parse_double(full, value);
    else if (full == "geometry.cell_h") cfg.cell_h = parse_double(full, value);
    else if (full == "geometry.macro_h") cfg.macro_h = parse_double(full, value);
    else if (full == "scaling.alpha") cfg.alpha = parse_double(full, value);
    else if (full == "scaling.beta") cfg.beta = parse_double(full, value);
    else if (full == "scaling.regime") cfg.regime = value;
    else if (full == "reactions.c1") cfg.c1 = parse_double(full, value);
    else if (full == "reactions.c2") cfg.c2 = parse_double(full, value);
    else if (full == "reactions.delta0") cfg.delta0 = parse_double(full, value);
    else if (full == "reactions.delta1") cfg.delta1 = parse_double(full, value);
    else if (full == "coefficient.kind") {
      if (value == "oscillatory") cfg.coefficient = CoefficientKind::Oscillatory;
      else if (value == "identity") cfg.coefficient = CoefficientKind::Identity;
      else if (value == "laminate") cfg.coefficient = CoefficientKind::Laminate;
      else if (value == "expression") cfg.coefficient = CoefficientKind::Expression;
      else
        throw std::invalid_argument("config key 'coefficient.kind': unknown kind '" +
                                    value + "'");
    } else if (full == "coefficient.expr") cfg.coefficient_expr = value;
    else if (full == "coefficient.gamma_lower") cfg.gamma_lower = parse_double(full, value);
    else if (full == "coefficient.gamma_upper") cfg.gamma_upper = parse_double(full, value);
    else if (full == "source.f") cfg.f = value;
    else if (full == "solver.cg_tol") cfg.cg_tol = parse_double(full, value);
    else if (full == "solver.fixpoint_tol") cfg.fixpoint_tol = parse_double(full, value);
    else if (full == "solver.max_iter") cfg.max_iter = parse_int(full, value);
    else if (full == "analysis.theta") cfg.theta = parse_int(full, value);
    else if (full == "analysis.mu") cfg.mu = parse_int(full, value);
    else if (full == "analysis.order") cfg.order = parse_int(full, value);
    else if (full == "analysis.cutoff") {
      if (value == "true" || value == "1") cfg.with_cutoff = true;
      else if (value == "false" || value == "0") cfg.with_cutoff = false;
      else
        throw std::invalid_argument("config key 'analysis.cutoff': expected true/false");
    }
    else if (full == "output.dir") cfg.out_dir = value;
    else if (full == "output.seed") cfg.seed = static_cast<unsigned>(parse_int(full, value));
    else
      throw std::invalid_argument("unknown config key '" + full + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace homog
