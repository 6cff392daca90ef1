#ifndef FORGE_INPUT_HPP
#define FORGE_INPUT_HPP

#include <string>

#include "multipoly.hpp"

namespace forge {

// Polynomial expression text: integer/rational literals, identifiers matching
// [A-Za-z][A-Za-z0-9_]*, operators + - * / ^ and parentheses; whitespace
// insensitive. Identifiers resolve to chart variables first, then tower
// parameters, then tower generators.
RationalFunction parse_expression(const std::string& text, const VarCtx& vars, const TowerPtr& t);

// convenience: must be polynomial
MultiPoly parse_poly(const std::string& text, const VarCtx& vars, const TowerPtr& t);

}  // namespace forge

#endif
