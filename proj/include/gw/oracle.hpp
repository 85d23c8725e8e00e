#pragma once

#include <cstddef>

#include "gw/gwcore.hpp"

namespace gw {

/// Degrees of freedom of the coupling polytope: (m-1)(n-1).
inline std::size_t coupling_dof(std::size_t m, std::size_t n) { return (m - 1) * (n - 1); }

enum class OracleMethod { closed_form_1dof, grid };

/// Desk-scale ground truth for the quadratic program.
struct OracleResult {
    double value = 0.0;
    Coupling coupling;
    OracleMethod method = OracleMethod::grid;
    int grid_resolution = 0;  // grid method only
    double error_bound = 0.0; // grid method only; 0 for the closed form
};

/// Exact global minimum for m = n = 2: the polytope is the segment
/// t = mu11 in [max(0, mu_x1 + mu_y1 - 1), min(mu_x1, mu_y1)] and the
/// objective is a univariate quadratic in t.
OracleResult oracle_1dof(const GwProblem& problem);

/// Global search for (m-1)(n-1) <= 4: parameterizes the free block of the
/// plan (pivoting on the last row and column), enumerates a uniform grid
/// over the bounding box, discards infeasible points, and polishes the best
/// feasible points with Frank-Wolfe at tol 1e-12. error_bound = L*h with h
/// the grid-cell diagonal and L = 2*||gamma||_F (a Lipschitz bound of the
/// objective over the polytope, where ||mu|| <= 1).
OracleResult oracle_grid(const GwProblem& problem, int resolution);

} // namespace gw
