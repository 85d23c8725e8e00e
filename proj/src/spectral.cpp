#include "gw/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "gw/errors.hpp"
#include "gw/kernels.hpp"

namespace gw {

namespace {

double offdiag_norm_sq(const Matrix& w) {
    const std::size_t k = w.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) s += w(i, j) * w(i, j);
    return 2.0 * s;
}

// Reduces the symmetric matrix held in the lower triangle of w to
// tridiagonal form (diagonal d, subdiagonal e with e[0] = 0) by Householder
// reflections. Row-wise single-pass loops so the inner work is dot/axpy on
// contiguous rows.
void householder_tridiagonalize(Matrix& w, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t k = w.rows();
    d.assign(k, 0.0);
    e.assign(k, 0.0);
    std::vector<double> v(k), p(k), q(k);

    for (std::size_t i = k - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double* wi = w.row(i);

        if (l == 0) {
            e[i] = wi[0];
            continue;
        }

        double scale = 0.0;
        for (std::size_t j = 0; j <= l; ++j) scale += std::abs(wi[j]);
        if (scale == 0.0) {
            e[i] = 0.0;
            continue;
        }

        double h = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
            v[j] = wi[j] / scale;
            h += v[j] * v[j];
        }
        const double f = v[l];
        const double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        v[l] = f - g;

        // p = A v / h on the leading (l+1) block, lower triangle only.
        std::fill(p.begin(), p.begin() + static_cast<long>(l + 1), 0.0);
        for (std::size_t r = 0; r <= l; ++r) {
            const double* row = w.row(r);
            p[r] += kernels::dot(row, v.data(), r);
            p[r] += row[r] * v[r];
            kernels::axpy(v[r], row, p.data(), r);
        }
        double vp = 0.0;
        for (std::size_t r = 0; r <= l; ++r) {
            p[r] /= h;
            vp += v[r] * p[r];
        }

        // q = p - (v'p / 2h) v, then A <- A - v q' - q v'.
        const double kk = vp / (2.0 * h);
        for (std::size_t r = 0; r <= l; ++r) q[r] = p[r] - kk * v[r];
        for (std::size_t r = 0; r <= l; ++r) {
            double* row = w.row(r);
            kernels::axpy(-v[r], q.data(), row, r + 1);
            kernels::axpy(-q[r], v.data(), row, r + 1);
        }
    }

    for (std::size_t j = 0; j < k; ++j) d[j] = w(j, j);
}

// Implicit-shift QL iteration on a tridiagonal matrix, eigenvalues only.
void tql_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= DBL_EPSILON * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    fail(errc::internal_inconsistency, "QL iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double pp = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pp;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pp;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pp = s * r;
                    d[i + 1] = g + pp;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] -= pp;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

std::vector<double> eigenvalues_jacobi(const Matrix& m) {
    require_symmetric(m);
    const std::size_t k = m.rows();
    Matrix w = m;
    const double norm = w.frobenius_norm();
    const double target_sq = (1e-12 * norm) * (1e-12 * norm);

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (offdiag_norm_sq(w) <= target_sq) break;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = w(p, q);
                if (apq == 0.0) continue;
                const double app = w(p, p);
                const double aqq = w(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e154)
                    t = 1.0 / (2.0 * theta);
                else
                    t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                kernels::rot(w.row(p), w.row(q), c, s, k);
                for (std::size_t j = 0; j < k; ++j) {
                    if (j == p || j == q) continue;
                    w(j, p) = w(p, j);
                    w(j, q) = w(q, j);
                }
                w(p, p) = app - t * apq;
                w(q, q) = aqq + t * apq;
                w(p, q) = 0.0;
                w(q, p) = 0.0;
            }
        }
    }
    if (offdiag_norm_sq(w) > target_sq)
        fail(errc::internal_inconsistency, "Jacobi iteration failed to converge in 100 sweeps");

    std::vector<double> ev(k);
    for (std::size_t i = 0; i < k; ++i) ev[i] = w(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> eigenvalues_tridiagonal(const Matrix& m) {
    require_symmetric(m);
    Matrix w = m;
    std::vector<double> d;
    std::vector<double> e;
    householder_tridiagonalize(w, d, e);
    tql_eigenvalues(d, e);
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> eigenvalues_symmetric(const Matrix& m) {
    require_symmetric(m);
    const std::size_t k = m.rows();
    if (k == 0) return {};
    if (k == 1) return {m(0, 0)};
    if (k <= kJacobiMaxDim) return eigenvalues_jacobi(m);
    return eigenvalues_tridiagonal(m);
}

double default_negative_tol(const Matrix& m) { return 1e-8 * std::max(1.0, m.frobenius_norm()); }

std::size_t count_negative(const Matrix& m, double tol) {
    if (!(tol > 0.0)) fail(errc::invalid_size, "negativity tolerance must be positive");
    const auto ev = eigenvalues_symmetric(m);
    std::size_t count = 0;
    for (double v : ev)
        if (v < -tol) ++count;
    return count;
}

std::size_t count_negative(const Matrix& m) { return count_negative(m, default_negative_tol(m)); }

double principal_minor_2x2(const GwProblem& problem) {
    if (problem.n < 2)
        fail(errc::too_few_points, "the second space needs at least two points for the 2x2 minor");
    const Matrix& g = problem.gamma;
    return g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
}

SpectralReport certify_nonconvex(const GwProblem& problem) {
    if (problem.m < 2 || problem.n < 2)
        fail(errc::too_few_points, "non-convexity certificate requires at least two points per space");

    SpectralReport report;
    report.eigenvalues = eigenvalues_symmetric(problem.gamma);
    report.tol = default_negative_tol(problem.gamma);
    for (double v : report.eigenvalues)
        if (v < -report.tol) ++report.negative_count;
    report.psd = report.eigenvalues.front() >= -report.tol;
    report.minor_det = principal_minor_2x2(problem);

    // The objective matrix of a valid instance can never be PSD; if the
    // numbers claim otherwise, the implementation is broken.
    if (report.psd || report.minor_det >= 0.0 || report.negative_count == 0)
        fail(errc::internal_inconsistency,
             "spectral certificate contradicts the non-convexity guarantee");
    return report;
}

void write_report_json(std::ostream& out, const SpectralReport& report) {
    nlohmann::json j;
    j["eigenvalues"] = report.eigenvalues;
    j["negative_count"] = report.negative_count;
    j["minor_det"] = report.minor_det;
    j["psd"] = report.psd;
    out << j.dump(2) << "\n";
}

} // namespace gw
