#ifndef OSTRO_PARSE_HPP
#define OSTRO_PARSE_HPP

#include <string>

#include "ostro/expr.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

/// Parse an infix expression against a chart's symbol table.
///
/// Grammar: + - * / ^ with the usual precedence, ^ right-associative,
/// unary minus, parentheses, single-argument function application for
/// sqrt, atanh, tanh, sin, cos, exp, ln, abs, and numeric literals
/// (integers, decimals, scientific notation).
///
/// Throws SyntaxError (with 1-based column) on malformed input and
/// UnknownSymbolError when a name is not in the chart.
Expr parse(const std::string& text, const Chart& chart);

}  // namespace ostro

#endif
