#include "gw/gwcore.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "gw/errors.hpp"
#include "gw/kernels.hpp"

namespace gw {

namespace {

// Neumaier-compensated accumulator for the 4-index sums, which must agree
// with the matrix path to 1e-12 relative.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

void require_exponent(double p) {
    if (!(p >= 1.0)) fail(errc::invalid_size, "exponent p must be >= 1");
}

// out[l] = |a - dy_row[l]|^p for one block row segment.
void power_diff_row(double a, const double* dy_row, double* out, std::size_t n, double p) {
    if (p == 1.0) {
        kernels::abs_diff(a, dy_row, out, n);
    } else if (p == 2.0) {
        kernels::sq_diff(a, dy_row, out, n);
    } else {
        for (std::size_t l = 0; l < n; ++l) out[l] = std::pow(std::abs(a - dy_row[l]), p);
    }
}

} // namespace

std::size_t flat_index(std::size_t i, std::size_t j, std::size_t m, std::size_t n) {
    if (i < 1 || i > m || j < 1 || j > n)
        fail(errc::index_out_of_range, "flat_index: pair index out of range");
    return (i - 1) * n + j;
}

std::vector<double> row_marginals(const Coupling& c) {
    std::vector<double> r(c.m, 0.0);
    for (std::size_t i = 0; i < c.m; ++i) r[i] = kernels::sum(c.mu.data() + i * c.n, c.n);
    return r;
}

std::vector<double> col_marginals(const Coupling& c) {
    std::vector<double> r(c.n, 0.0);
    for (std::size_t i = 0; i < c.m; ++i)
        for (std::size_t j = 0; j < c.n; ++j) r[j] += c.at(i, j);
    return r;
}

double marginal_error(const Coupling& c, const std::vector<double>& mu_x,
                      const std::vector<double>& mu_y) {
    if (c.m != mu_x.size() || c.n != mu_y.size() || c.mu.size() != c.m * c.n)
        fail(errc::dimension_mismatch, "coupling dimensions do not match the marginals");
    for (double v : c.mu)
        if (v < 0.0) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    const auto rows = row_marginals(c);
    const auto cols = col_marginals(c);
    for (std::size_t i = 0; i < c.m; ++i) worst = std::max(worst, std::abs(rows[i] - mu_x[i]));
    for (std::size_t j = 0; j < c.n; ++j) worst = std::max(worst, std::abs(cols[j] - mu_y[j]));
    return worst;
}

Coupling independence_coupling(const std::vector<double>& mu_x, const std::vector<double>& mu_y) {
    Coupling c;
    c.m = mu_x.size();
    c.n = mu_y.size();
    c.mu.resize(c.m * c.n);
    for (std::size_t i = 0; i < c.m; ++i)
        for (std::size_t j = 0; j < c.n; ++j) c.at(i, j) = mu_x[i] * mu_y[j];
    return c;
}

Coupling diagonal_coupling(const std::vector<double>& measure) {
    Coupling c;
    c.m = measure.size();
    c.n = measure.size();
    c.mu.assign(c.m * c.n, 0.0);
    for (std::size_t i = 0; i < c.m; ++i) c.at(i, i) = measure[i];
    return c;
}

Matrix build_gamma(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p) {
    require_exponent(p);
    const std::size_t m = X.n_points;
    const std::size_t n = Y.n_points;
    Matrix gamma(m * n, m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double* out_row = gamma.row(i * n + j);
            for (std::size_t k = 0; k < m; ++k)
                power_diff_row(X.dist(i, k), Y.dist.row(j), out_row + k * n, n, p);
        }
    }
    return gamma;
}

std::pair<Matrix, std::vector<double>> build_constraints(const std::vector<double>& mu_x,
                                                         const std::vector<double>& mu_y) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    Matrix a(m + n, m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, i * n + j) = 1.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) a(m + j, i * n + j) = 1.0;

    std::vector<double> b;
    b.reserve(m + n);
    b.insert(b.end(), mu_x.begin(), mu_x.end());
    b.insert(b.end(), mu_y.begin(), mu_y.end());
    return {std::move(a), std::move(b)};
}

GwProblem build_problem(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p) {
    GwProblem problem;
    problem.m = X.n_points;
    problem.n = Y.n_points;
    problem.p = p;
    problem.gamma = build_gamma(X, Y, p);
    auto [a, b] = build_constraints(X.measure, Y.measure);
    problem.constraint_matrix = std::move(a);
    problem.rhs = std::move(b);
    return problem;
}

void DenseGammaOperator::matvec(const double* x, double* y) const {
    const std::size_t k = gamma_->rows();
    for (std::size_t r = 0; r < k; ++r) y[r] = kernels::dot(gamma_->row(r), x, k);
}

TensorGammaOperator::TensorGammaOperator(const MetricMeasureSpace& X, const MetricMeasureSpace& Y,
                                         double p)
    : m_(X.n_points), n_(Y.n_points), p_(p), dist_x_(X.dist), dist_y_(Y.dist) {
    require_exponent(p);
}

void TensorGammaOperator::matvec(const double* x, double* y) const {
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m_; ++k) {
                power_diff_row(dist_x_(i, k), dist_y_.row(j), w.data(), n_, p_);
                acc += kernels::dot(w.data(), x + k * n_, n_);
            }
            y[i * n_ + j] = acc;
        }
    }
}

double objective(const GwProblem& problem, const Coupling& coupling) {
    if (coupling.m != problem.m || coupling.n != problem.n ||
        coupling.mu.size() != problem.dim())
        fail(errc::dimension_mismatch, "coupling does not match the problem dimensions");
    const std::size_t k = problem.dim();
    std::vector<double> t(k);
    DenseGammaOperator op(problem.gamma);
    op.matvec(coupling.mu.data(), t.data());
    return kernels::dot(coupling.mu.data(), t.data(), k);
}

double objective_tensor(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p,
                        const Coupling& coupling) {
    require_exponent(p);
    const std::size_t m = X.n_points;
    const std::size_t n = Y.n_points;
    if (coupling.m != m || coupling.n != n)
        fail(errc::dimension_mismatch, "coupling does not match the spaces");
    Kahan acc;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double mu_ij = coupling.at(i, j);
            if (mu_ij == 0.0) continue;
            for (std::size_t k = 0; k < m; ++k) {
                const double dx = X.dist(i, k);
                for (std::size_t l = 0; l < n; ++l) {
                    const double mu_kl = coupling.at(k, l);
                    if (mu_kl == 0.0) continue;
                    double w;
                    if (p == 1.0)
                        w = std::abs(dx - Y.dist(j, l));
                    else if (p == 2.0) {
                        const double d = dx - Y.dist(j, l);
                        w = d * d;
                    } else {
                        w = std::pow(std::abs(dx - Y.dist(j, l)), p);
                    }
                    acc.add(w * mu_ij * mu_kl);
                }
            }
        }
    return acc.value();
}

std::vector<double> gradient(const GwProblem& problem, const Coupling& coupling) {
    if (coupling.mu.size() != problem.dim())
        fail(errc::dimension_mismatch, "coupling does not match the problem dimensions");
    const std::size_t k = problem.dim();
    std::vector<double> g(k);
    DenseGammaOperator op(problem.gamma);
    op.matvec(coupling.mu.data(), g.data());
    kernels::scale(2.0, g.data(), k);
    return g;
}

double gw_distance(double optimal_value, double p) {
    require_exponent(p);
    if (optimal_value < 0.0) fail(errc::negative_value, "optimal value must be nonnegative");
    return 0.5 * std::pow(optimal_value, 1.0 / p);
}

QapDecomposition qap_decompose(const MetricMeasureSpace& X, const MetricMeasureSpace& Y,
                               const Coupling& coupling) {
    const std::size_t m = X.n_points;
    const std::size_t n = Y.n_points;
    if (coupling.m != m || coupling.n != n)
        fail(errc::dimension_mismatch, "coupling does not match the spaces");

    Kahan constant;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            const double d = X.dist(i, k);
            constant.add(d * d * X.measure[i] * X.measure[k]);
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
            const double h = Y.dist(j, l);
            constant.add(h * h * Y.measure[j] * Y.measure[l]);
        }

    // 2 * sum_{ijkl} (-d_X(i,k)) * d_Y(j,l) * mu_ij * mu_kl
    Kahan cross;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double mu_ij = coupling.at(i, j);
            if (mu_ij == 0.0) continue;
            for (std::size_t k = 0; k < m; ++k) {
                const double f = -X.dist(i, k);
                for (std::size_t l = 0; l < n; ++l)
                    cross.add(2.0 * f * Y.dist(j, l) * mu_ij * coupling.at(k, l));
            }
        }

    return {constant.value(), cross.value()};
}

void write_gamma_json(std::ostream& out, const GwProblem& problem) {
    nlohmann::json j;
    j["m"] = problem.m;
    j["n"] = problem.n;
    j["p"] = problem.p;
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < problem.dim(); ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < problem.dim(); ++c) row.push_back(problem.gamma(r, c));
        rows.push_back(std::move(row));
    }
    j["gamma"] = std::move(rows);
    out << j.dump(2) << "\n";
}

void write_gamma_csv(std::ostream& out, const GwProblem& problem) {
    const auto prec = out.precision(17);
    for (std::size_t r = 0; r < problem.dim(); ++r) {
        for (std::size_t c = 0; c < problem.dim(); ++c) {
            if (c) out << ",";
            out << problem.gamma(r, c);
        }
        out << "\n";
    }
    out.precision(prec);
}

} // namespace gw
