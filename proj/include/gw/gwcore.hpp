#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gw/matrix.hpp"
#include "gw/mmspace.hpp"

namespace gw {

/// Row-major flattening of the pair index (i,j), 1-based as in the block
/// layout of the objective matrix: (i-1)*n + j. Every module shares this
/// convention.
std::size_t flat_index(std::size_t i, std::size_t j, std::size_t m, std::size_t n);

/// A joint probability vector over the product of an m-point and an n-point
/// space, stored flat.
struct Coupling {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> mu;

    double& at(std::size_t i, std::size_t j) { return mu[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return mu[i * n + j]; }
};

std::vector<double> row_marginals(const Coupling& c);
std::vector<double> col_marginals(const Coupling& c);

/// Largest deviation of the coupling's marginals from (mu_x, mu_y), or +inf
/// if an entry is negative.
double marginal_error(const Coupling& c, const std::vector<double>& mu_x,
                      const std::vector<double>& mu_y);

/// Product coupling mu[(i,j)] = mu_x(i) * mu_y(j); feasible by construction.
Coupling independence_coupling(const std::vector<double>& mu_x, const std::vector<double>& mu_y);

/// mu[(i,i)] = measure(i), zero elsewhere. Feasible only when both spaces
/// carry the same measure (the X = Y self-coupling).
Coupling diagonal_coupling(const std::vector<double>& measure);

/// The flattened quadratic program: minimize mu' gamma mu subject to
/// constraint_matrix * mu = rhs, mu >= 0.
struct GwProblem {
    std::size_t m = 0;
    std::size_t n = 0;
    double p = 1.0;
    Matrix gamma;             // (m*n) x (m*n), symmetric, zero diagonal
    Matrix constraint_matrix; // (m+n) x (m*n), 0/1, rank m+n-1
    std::vector<double> rhs;  // (mu_x; mu_y)

    std::size_t dim() const { return m * n; }
    std::vector<double> mu_x() const { return {rhs.begin(), rhs.begin() + static_cast<long>(m)}; }
    std::vector<double> mu_y() const { return {rhs.begin() + static_cast<long>(m), rhs.end()}; }
};

/// Entry (flat(i,j), flat(k,l)) = |d_X(i,k) - d_Y(j,l)|^p. Exactly symmetric:
/// mirrored entries are computed from bitwise-equal inputs.
Matrix build_gamma(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p);

/// Marginal-sum constraint system: rows 1..m pick row sums, rows m+1..m+n
/// column sums; rhs stacks the two measures. Every column has exactly two
/// ones; the row rank is m+n-1 (one redundancy since both measures sum to 1).
std::pair<Matrix, std::vector<double>> build_constraints(const std::vector<double>& mu_x,
                                                         const std::vector<double>& mu_y);

GwProblem build_problem(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p);

/// mu' gamma mu through the dense matrix.
double objective(const GwProblem& problem, const Coupling& coupling);

/// The same value as the direct 4-index tensor sum over the two distance
/// matrices, compensated summation, no gamma materialization. Cross-checked
/// against objective() in tests.
double objective_tensor(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p,
                        const Coupling& coupling);

/// Gradient 2 * gamma * mu of the quadratic objective.
std::vector<double> gradient(const GwProblem& problem, const Coupling& coupling);

/// Abstract y = gamma * x, so solvers run either off the dense matrix or
/// matrix-free.
class GammaOperator {
public:
    virtual ~GammaOperator() = default;
    virtual std::size_t dim() const = 0;
    virtual void matvec(const double* x, double* y) const = 0;
};

/// Dense-backed operator; keeps a reference, the problem must outlive it.
class DenseGammaOperator final : public GammaOperator {
public:
    explicit DenseGammaOperator(const Matrix& gamma) : gamma_(&gamma) {}
    std::size_t dim() const override { return gamma_->rows(); }
    void matvec(const double* x, double* y) const override;

private:
    const Matrix* gamma_;
};

/// Matrix-free operator contracting the 4-index tensor directly from the two
/// distance matrices; O(m^2 n^2) per product, O(m^2 + n^2) memory. For use
/// when m*n is too large to hold gamma densely.
class TensorGammaOperator final : public GammaOperator {
public:
    TensorGammaOperator(const MetricMeasureSpace& X, const MetricMeasureSpace& Y, double p);
    std::size_t dim() const override { return m_ * n_; }
    void matvec(const double* x, double* y) const override;

private:
    std::size_t m_;
    std::size_t n_;
    double p_;
    Matrix dist_x_;
    Matrix dist_y_;
};

/// Half the p-th root of the optimal value.
double gw_distance(double optimal_value, double p);

/// Squared-loss split of the objective into a coupling-independent constant
/// and the assignment-style cross term; constant + cross_term equals the
/// p = 2 objective for any feasible coupling.
struct QapDecomposition {
    double constant = 0.0;
    double cross_term = 0.0;
};

QapDecomposition qap_decompose(const MetricMeasureSpace& X, const MetricMeasureSpace& Y,
                               const Coupling& coupling);

/// {"m":.., "n":.., "p":.., "gamma":[[row],...]}
void write_gamma_json(std::ostream& out, const GwProblem& problem);

/// One gamma row per line, comma separated.
void write_gamma_csv(std::ostream& out, const GwProblem& problem);

} // namespace gw
