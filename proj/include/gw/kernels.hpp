#pragma once

#include <cstddef>
#include <string>

namespace gw::kernels {

// The arithmetic inner loops (gamma-matrix fill, dense matvecs, Householder
// and Jacobi row updates) are routed through this table. Scalar code is the
// reference semantics; the AVX2 and AVX-512 variants are selected at runtime
// when the CPU supports them and are equivalence-tested against scalar.
enum class Backend { scalar, avx2, avx512 };

/// Best backend the current CPU supports, or the override from the
/// GW_KERNEL_BACKEND environment variable (scalar|avx2|avx512).
Backend active();

bool supported(Backend b);
const char* backend_name(Backend b);

/// Force a specific backend (tests use this to compare variants).
/// Throws gw::error{invalid_size} if the CPU cannot run it.
void force_backend(Backend b);

/// Reset to automatic detection.
void reset_backend();

/// Sum_i x[i] * y[i].
double dot(const double* x, const double* y, std::size_t n);

/// y[i] += a * x[i].
void axpy(double a, const double* x, double* y, std::size_t n);

/// Plane rotation: (x[i], y[i]) <- (c*x[i] - s*y[i], s*x[i] + c*y[i]).
void rot(double* x, double* y, double c, double s, std::size_t n);

/// out[i] = |a - y[i]|.
void abs_diff(double a, const double* y, double* out, std::size_t n);

/// out[i] = (a - y[i])^2.
void sq_diff(double a, const double* y, double* out, std::size_t n);

/// x[i] *= a.
void scale(double a, double* x, std::size_t n);

/// Sum_i x[i].
double sum(const double* x, std::size_t n);

// Reference implementations, always available.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
void abs_diff(double a, const double* y, double* out, std::size_t n);
void sq_diff(double a, const double* y, double* out, std::size_t n);
void scale(double a, double* x, std::size_t n);
double sum(const double* x, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
void abs_diff(double a, const double* y, double* out, std::size_t n);
void sq_diff(double a, const double* y, double* out, std::size_t n);
void scale(double a, double* x, std::size_t n);
double sum(const double* x, std::size_t n);
} // namespace avx2

namespace avx512 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
void abs_diff(double a, const double* y, double* out, std::size_t n);
void sq_diff(double a, const double* y, double* out, std::size_t n);
void scale(double a, double* x, std::size_t n);
double sum(const double* x, std::size_t n);
} // namespace avx512
#endif

} // namespace gw::kernels
