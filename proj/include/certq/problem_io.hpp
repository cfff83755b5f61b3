#pragma once

#include <iosfwd>
#include <string>

#include "certq/ipm.hpp"

namespace certq {

/// Reads a problem file: a JSON document with keys "Q" (array of arrays),
/// "d", "l", "u" (arrays of numbers). Dimension errors name the offending
/// field; syntax errors carry the parser's position diagnostic. The returned
/// problem is validated. Throws InvalidProblem on any rejection.
BoxQP load_box_qp(std::istream& is);
BoxQP load_box_qp_file(const std::string& path);

/// Writes the same JSON schema (used by tests and the bench tool).
void save_box_qp(std::ostream& os, const BoxQP& p);

}  // namespace certq
