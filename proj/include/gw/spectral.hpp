#pragma once

#include <iosfwd>
#include <vector>

#include "gw/gwcore.hpp"
#include "gw/matrix.hpp"

namespace gw {

/// Non-convexity certificate for one problem instance.
struct SpectralReport {
    std::vector<double> eigenvalues; // ascending
    std::size_t negative_count = 0;  // eigenvalues < -tol
    double minor_det = 0.0;          // det of gamma's top-left 2x2 block
    bool psd = true;                 // min eigenvalue >= -tol
    double tol = 0.0;                // threshold used for the counts
};

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi up to
/// kJacobiMaxDim, Householder tridiagonalization + implicit QL beyond; the
/// two paths are equivalence-tested against each other.
std::vector<double> eigenvalues_symmetric(const Matrix& m);

inline constexpr std::size_t kJacobiMaxDim = 128;

/// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius norm
/// drops below 1e-12 * ||M||_F (at most 100 sweeps). Reference path.
std::vector<double> eigenvalues_jacobi(const Matrix& m);

/// Householder reduction to tridiagonal form followed by the implicit-shift
/// QL iteration, eigenvalues only. Fast path for large matrices.
std::vector<double> eigenvalues_tridiagonal(const Matrix& m);

/// Threshold below which an eigenvalue counts as negative:
/// 1e-8 * max(1, ||M||_F).
double default_negative_tol(const Matrix& m);

std::size_t count_negative(const Matrix& m, double tol);
std::size_t count_negative(const Matrix& m);

/// det of gamma's top-left 2x2 principal submatrix; equals
/// -d_Y(y1,y2)^(2p), strictly negative for every valid instance with n >= 2.
double principal_minor_2x2(const GwProblem& problem);

/// Full certificate. A PSD verdict on a valid instance with m,n >= 2 is an
/// implementation bug, reported as InternalInconsistency.
SpectralReport certify_nonconvex(const GwProblem& problem);

/// {"eigenvalues":[...], "negative_count":..., "minor_det":..., "psd":false}
void write_report_json(std::ostream& out, const SpectralReport& report);

} // namespace gw
