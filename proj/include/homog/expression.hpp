#pragma once

#include <functional>
#include <string>

namespace homog {

/// Parses an arithmetic expression in the variables x1, x2 (y1, y2 are
/// accepted as aliases) with +, -, *, /, ^, parentheses, the constant pi,
/// and the functions sin, cos, tan, exp, log, sqrt, abs, tanh, min, max,
/// pow. Throws std::invalid_argument with the offending position on parse
/// errors.
std::function<double(double, double)> parse_expression(const std::string& text);

}  // namespace homog
