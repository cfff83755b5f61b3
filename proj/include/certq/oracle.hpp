#pragma once

#include "certq/ipm.hpp"

namespace certq {

enum class OracleMethod { ActiveSetEnumeration, ProjectedGradient };

/// Ground-truth solution from one of the test oracles.
struct OracleResult {
  Vec ystar;
  double objective = 0.0;
  OracleMethod method = OracleMethod::ActiveSetEnumeration;
};

/// ½yᵀQy + dᵀy.
double objective(const BoxQP& p, const Vec& y);

/// Projection fixed-point residual ||y - clip(y - (Qy+d), l, u)||inf;
/// zero exactly at KKT points of the box QP.
double kkt_residual(const BoxQP& p, const Vec& y);

/// Exact solve by enumerating every assignment of coordinates to
/// {at lower, at upper, free}, solving the free subsystem and keeping the
/// candidate that satisfies bounds and multiplier signs. Assignments sharing
/// a free set reuse one factorization and walk the 2^|bound| bound patterns
/// in Gray-code order; the scan parallelizes over free sets with a
/// deterministic reduction. Throws DimensionTooLarge for n > 12.
OracleResult solve_enumeration(const BoxQP& p);

/// Straight 3^n reference: one standalone subsystem solve per assignment.
/// Kept as the slow cross-check for solve_enumeration.
OracleResult solve_enumeration_serial(const BoxQP& p);

/// Projected gradient with fixed step 1/L, L the Gershgorin row-sum bound of
/// Q. Stops when ||y+ - y||inf <= tol * max(1, ||y||inf); throws
/// IterationLimit after 1e6 iterations.
OracleResult solve_projected_gradient(const BoxQP& p, double tol);

}  // namespace certq
