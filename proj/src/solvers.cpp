#include "gw/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gw/errors.hpp"
#include "gw/kernels.hpp"

namespace gw {

namespace {

constexpr double kMarginalTol = 1e-9;

void require_measure(const std::vector<double>& mu, const char* side) {
    double total = 0.0;
    for (double v : mu) {
        if (v <= 0.0) fail(errc::measure_not_simplex, std::string(side) + " measure has a non-positive entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6)
        fail(errc::measure_not_simplex, std::string(side) + " measure does not sum to 1");
}

// ---------------------------------------------------------------------------
// Transportation simplex.
//
// Nodes 0..m-1 are rows, m..m+n-1 are columns. The basis is a spanning tree
// with m+n-1 cells; entering variables follow Bland's rule (lowest flat index
// with negative reduced cost), which rules out cycling, and the leaving
// variable is the minimum-flow cell on the negative side of the cycle, ties
// again by lowest flat index.
// ---------------------------------------------------------------------------
class TransportSimplex {
public:
    TransportSimplex(const Matrix& cost, const std::vector<double>& mu_x,
                     const std::vector<double>& mu_y)
        : cost_(cost), m_(mu_x.size()), n_(mu_y.size()) {
        northwest_corner(mu_x, mu_y);
        double scale = 1.0;
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j) scale = std::max(scale, std::abs(cost_(i, j)));
        enter_tol_ = 1e-12 * scale;
    }

    Coupling solve() {
        const std::size_t pivot_cap = 1000 * (m_ + n_) * std::max<std::size_t>(m_ * n_, 16);
        for (std::size_t pivots = 0; pivots < pivot_cap; ++pivots) {
            compute_potentials();
            const auto entering = find_entering();
            if (!entering) {
                Coupling out;
                out.m = m_;
                out.n = n_;
                out.mu.assign(m_ * n_, 0.0);
                for (std::size_t b = 0; b < cells_.size(); ++b)
                    out.mu[cells_[b].i * n_ + cells_[b].j] = std::max(0.0, flow_[b]);
                return out;
            }
            pivot(entering->first, entering->second);
        }
        fail(errc::internal_inconsistency, "transportation simplex exceeded its pivot budget");
    }

private:
    struct Cell {
        std::size_t i;
        std::size_t j;
    };

    void add_cell(std::size_t i, std::size_t j, double f) {
        adj_[i].push_back(cells_.size());
        adj_[m_ + j].push_back(cells_.size());
        cells_.push_back({i, j});
        flow_.push_back(f);
    }

    void drop_cell(std::size_t b) {
        auto detach = [&](std::size_t node) {
            auto& list = adj_[node];
            list.erase(std::find(list.begin(), list.end(), b));
        };
        detach(cells_[b].i);
        detach(m_ + cells_[b].j);
        // Swap-remove; fix the adjacency indices of the moved cell.
        const std::size_t last = cells_.size() - 1;
        if (b != last) {
            for (std::size_t node : {cells_[last].i, m_ + cells_[last].j})
                for (auto& idx : adj_[node])
                    if (idx == last) idx = b;
            cells_[b] = cells_[last];
            flow_[b] = flow_[last];
        }
        cells_.pop_back();
        flow_.pop_back();
    }

    void northwest_corner(std::vector<double> a, std::vector<double> b) {
        adj_.assign(m_ + n_, {});
        cells_.reserve(m_ + n_ - 1);
        flow_.reserve(m_ + n_ - 1);
        std::size_t i = 0;
        std::size_t j = 0;
        while (true) {
            const double f = std::min(a[i], b[j]);
            add_cell(i, j, f);
            a[i] -= f;
            b[j] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (i == m_ - 1)
                ++j;
            else if (j == n_ - 1)
                ++i;
            else if (a[i] <= b[j])
                ++i;
            else
                ++j;
        }
    }

    void compute_potentials() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<char> seen(m_ + n_, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            for (const std::size_t b : adj_[node]) {
                const std::size_t other = (node < m_) ? m_ + cells_[b].j : cells_[b].i;
                if (seen[other]) continue;
                seen[other] = 1;
                if (node < m_)
                    v_[cells_[b].j] = cost_(cells_[b].i, cells_[b].j) - u_[cells_[b].i];
                else
                    u_[cells_[b].i] = cost_(cells_[b].i, cells_[b].j) - v_[cells_[b].j];
                stack.push_back(other);
            }
        }
    }

    std::optional<std::pair<std::size_t, std::size_t>> find_entering() const {
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (cost_(i, j) - u_[i] - v_[j] < -enter_tol_) return std::make_pair(i, j);
        return std::nullopt;
    }

    // Tree path from row node i to column node m+j, as a list of basic cells.
    std::vector<std::size_t> tree_path(std::size_t i, std::size_t j) const {
        const std::size_t src = i;
        const std::size_t dst = m_ + j;
        std::vector<long> via(m_ + n_, -1); // basic cell used to reach each node
        std::vector<std::size_t> stack{src};
        std::vector<char> seen(m_ + n_, 0);
        seen[src] = 1;
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            if (node == dst) break;
            for (const std::size_t b : adj_[node]) {
                const std::size_t other = (node < m_) ? m_ + cells_[b].j : cells_[b].i;
                if (seen[other]) continue;
                seen[other] = 1;
                via[other] = static_cast<long>(b);
                stack.push_back(other);
            }
        }
        std::vector<std::size_t> path;
        std::size_t node = dst;
        while (node != src) {
            const std::size_t b = static_cast<std::size_t>(via[node]);
            path.push_back(b);
            // Step to the cell's other endpoint.
            node = (node >= m_) ? cells_[b].i : m_ + cells_[b].j;
        }
        return path;
    }

    void pivot(std::size_t i, std::size_t j) {
        // Cycle = entering edge + the tree path from column node back to row
        // node. Walking the path starting at the column end, edges alternate
        // minus, plus, minus, ...
        const auto path = tree_path(i, j);
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = 0;
        std::size_t leave_flat = 0;
        bool have_leave = false;
        for (std::size_t pos = 0; pos < path.size(); pos += 2) {
            const std::size_t b = path[pos];
            const std::size_t flat = cells_[b].i * n_ + cells_[b].j;
            if (!have_leave || flow_[b] < theta || (flow_[b] == theta && flat < leave_flat)) {
                theta = flow_[b];
                leave = b;
                leave_flat = flat;
                have_leave = true;
            }
        }
        for (std::size_t pos = 0; pos < path.size(); ++pos) {
            if (pos % 2 == 0)
                flow_[path[pos]] -= theta;
            else
                flow_[path[pos]] += theta;
        }
        flow_[leave] = 0.0;
        drop_cell(leave);
        add_cell(i, j, theta);
    }

    const Matrix& cost_;
    std::size_t m_;
    std::size_t n_;
    double enter_tol_ = 0.0;
    std::vector<Cell> cells_;
    std::vector<double> flow_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<double> u_;
    std::vector<double> v_;
};

Coupling validated_init(const Coupling& init, const std::vector<double>& mu_x,
                        const std::vector<double>& mu_y) {
    if (init.m != mu_x.size() || init.n != mu_y.size() || init.mu.size() != init.m * init.n)
        fail(errc::dimension_mismatch, "initial coupling has wrong dimensions");
    if (marginal_error(init, mu_x, mu_y) > kMarginalTol)
        fail(errc::infeasible_init, "initial coupling does not satisfy the marginals");
    return init;
}

struct Quadratic {
    const GammaOperator& op;
    std::vector<double> scratch;

    explicit Quadratic(const GammaOperator& o) : op(o), scratch(o.dim()) {}

    // Returns f(x) = x' gamma x and leaves gamma*x in scratch.
    double value(const std::vector<double>& x) {
        op.matvec(x.data(), scratch.data());
        return kernels::dot(x.data(), scratch.data(), x.size());
    }
};

Matrix cost_from_gradient(const std::vector<double>& g, std::size_t m, std::size_t n) {
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = g[i * n + j];
    return c;
}

} // namespace

Coupling ot_linear(const Matrix& cost, const std::vector<double>& mu_x,
                   const std::vector<double>& mu_y) {
    if (cost.rows() != mu_x.size() || cost.cols() != mu_y.size())
        fail(errc::dimension_mismatch, "cost matrix does not match the marginals");
    for (std::size_t i = 0; i < cost.rows(); ++i)
        for (std::size_t j = 0; j < cost.cols(); ++j)
            if (!std::isfinite(cost(i, j)))
                fail(errc::invalid_size, "cost matrix has a non-finite entry");
    require_measure(mu_x, "row");
    require_measure(mu_y, "column");
    return TransportSimplex(cost, mu_x, mu_y).solve();
}

SolveResult frank_wolfe(const GammaOperator& op, const std::vector<double>& mu_x,
                        const std::vector<double>& mu_y, double p, const Coupling& init,
                        int max_iter, double tol) {
    if (max_iter < 0) fail(errc::invalid_size, "max_iter must be nonnegative");
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    if (op.dim() != m * n) fail(errc::dimension_mismatch, "operator does not match the marginals");

    Coupling mu = validated_init(init, mu_x, mu_y);
    Quadratic quad(op);
    const std::size_t dim = m * n;
    std::vector<double> grad(dim), dir(dim), gamma_dir(dim);

    SolveResult result;
    result.coupling = mu;

    double value = quad.value(mu.mu);
    int accepted = 0;
    double gap = 0.0;

    for (int iter = 0;; ++iter) {
        // gradient = 2 gamma mu; quad.value left gamma*mu in scratch.
        for (std::size_t r = 0; r < dim; ++r) grad[r] = 2.0 * quad.scratch[r];
        const Coupling vertex = ot_linear(cost_from_gradient(grad, m, n), mu_x, mu_y);
        gap = kernels::dot(grad.data(), mu.mu.data(), dim) -
              kernels::dot(grad.data(), vertex.mu.data(), dim);
        result.history.push_back({iter, value, gap});

        if (iter >= max_iter) break;

        for (std::size_t r = 0; r < dim; ++r) dir[r] = vertex.mu[r] - mu.mu[r];
        op.matvec(dir.data(), gamma_dir.data());
        const double a = kernels::dot(dir.data(), gamma_dir.data(), dim);
        const double b = -gap; // 2 mu' gamma d
        double step;
        if (a > 0.0)
            step = std::clamp(-b / (2.0 * a), 0.0, 1.0);
        else
            step = (a + b < 0.0) ? 1.0 : 0.0;

        // A small gap alone is not conclusive on an indefinite quadratic: an
        // interior stationary point can still be escaped when the segment to
        // the oracle vertex is concave, so stop only once the line search
        // yields no strict decrease.
        if (step == 0.0) break;
        Coupling cand = mu;
        for (std::size_t r = 0; r < dim; ++r)
            cand.mu[r] = (1.0 - step) * mu.mu[r] + step * vertex.mu[r];
        const double cand_value = quad.value(cand.mu);
        const bool no_progress = cand_value >= value;
        const bool negligible_escape =
            gap <= tol && value - cand_value <= tol * std::max(1.0, std::abs(value));
        if (no_progress || negligible_escape) {
            // Keep the current iterate; re-evaluate so scratch matches mu.
            quad.value(mu.mu);
            break;
        }
        if (marginal_error(cand, mu_x, mu_y) > kMarginalTol)
            fail(errc::internal_inconsistency, "Frank-Wolfe iterate left the coupling polytope");
        mu = std::move(cand);
        value = cand_value;
        ++accepted;
    }

    result.coupling = std::move(mu);
    result.value = value;
    result.distance = gw_distance(std::max(0.0, value), p);
    result.iterations = accepted;
    result.fw_gap = gap;
    return result;
}

SolveResult frank_wolfe(const GwProblem& problem, const Coupling& init, int max_iter, double tol) {
    DenseGammaOperator op(problem.gamma);
    return frank_wolfe(op, problem.mu_x(), problem.mu_y(), problem.p, init, max_iter, tol);
}

double default_epsilon(const GwProblem& problem) {
    const std::size_t k = problem.dim();
    double mean = kernels::sum(problem.gamma.data(), k * k) / static_cast<double>(k * k);
    if (mean <= 0.0) mean = 1.0; // degenerate all-zero objective
    return 0.05 * mean;
}

namespace {

// One Sinkhorn projection of kernel onto the polytope, plain scaling.
// Returns false when a scaling factor degenerates (underflow), in which case
// the caller retries in log domain.
bool sinkhorn_scale(const Matrix& kernel, const std::vector<double>& mu_x,
                    const std::vector<double>& mu_y, int iters, Matrix& out) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    std::vector<double> u(m, 1.0), v(n, 1.0);
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += kernel(i, j) * v[j];
            if (!(s > 0.0) || !std::isfinite(s)) return false;
            u[i] = mu_x[i] / s;
            if (!std::isfinite(u[i])) return false;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += kernel(i, j) * u[i];
            if (!(s > 0.0) || !std::isfinite(s)) return false;
            v[j] = mu_y[j] / s;
            if (!std::isfinite(v[j])) return false;
        }
    }
    out = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = u[i] * kernel(i, j) * v[j];
    return true;
}

double log_sum_exp(const std::vector<double>& terms) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double t : terms) hi = std::max(hi, t);
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - hi);
    return hi + std::log(s);
}

// Log-domain Sinkhorn on log_kernel (entries may be -inf).
bool sinkhorn_log(const Matrix& log_kernel, const std::vector<double>& mu_x,
                  const std::vector<double>& mu_y, int iters, Matrix& out) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    std::vector<double> f(m, 0.0), g(n, 0.0), terms;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            terms.assign(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) terms[j] = log_kernel(i, j) + g[j];
            f[i] = std::log(mu_x[i]) - log_sum_exp(terms);
            if (std::isnan(f[i])) return false;
        }
        for (std::size_t j = 0; j < n; ++j) {
            terms.assign(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) terms[i] = log_kernel(i, j) + f[i];
            g[j] = std::log(mu_y[j]) - log_sum_exp(terms);
            if (std::isnan(g[j])) return false;
        }
    }
    out = Matrix(m, n);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = std::exp(log_kernel(i, j) + f[i] + g[j]);
            if (!std::isfinite(out(i, j))) return false;
            total += out(i, j);
        }
    return total > 0.0;
}

} // namespace

SolveResult entropic_gw(const GwProblem& problem, double epsilon, int outer_iters,
                        int sinkhorn_iters, const std::optional<Coupling>& init) {
    if (!(epsilon > 0.0)) fail(errc::invalid_size, "epsilon must be positive");
    if (outer_iters < 0 || sinkhorn_iters < 0)
        fail(errc::invalid_size, "iteration counts must be nonnegative");

    const auto mu_x = problem.mu_x();
    const auto mu_y = problem.mu_y();
    const std::size_t m = problem.m;
    const std::size_t n = problem.n;
    const std::size_t dim = problem.dim();

    Coupling mu = validated_init(init ? *init : independence_coupling(mu_x, mu_y), mu_x, mu_y);

    DenseGammaOperator op(problem.gamma);
    Quadratic quad(op);
    std::vector<double> grad(dim);

    SolveResult result;
    auto gap_at = [&](const Coupling& c) {
        quad.value(c.mu);
        for (std::size_t r = 0; r < dim; ++r) grad[r] = 2.0 * quad.scratch[r];
        const Coupling vertex = ot_linear(cost_from_gradient(grad, m, n), mu_x, mu_y);
        return kernels::dot(grad.data(), c.mu.data(), dim) -
               kernels::dot(grad.data(), vertex.mu.data(), dim);
    };

    const int steps = (sinkhorn_iters == 0) ? 0 : outer_iters;
    int t = 0;
    for (; t < steps; ++t) {
        const double value = quad.value(mu.mu);
        for (std::size_t r = 0; r < dim; ++r) grad[r] = 2.0 * quad.scratch[r];
        const Coupling vertex = ot_linear(cost_from_gradient(grad, m, n), mu_x, mu_y);
        const double gap = kernels::dot(grad.data(), mu.mu.data(), dim) -
                           kernels::dot(grad.data(), vertex.mu.data(), dim);
        result.history.push_back({t, value, gap});

        // Mirror step: kernel = plan ⊙ exp(-grad/eps), projected back onto
        // the polytope.
        Matrix kernel(m, n);
        bool finite = true;
        for (std::size_t i = 0; i < m && finite; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                kernel(i, j) = mu.at(i, j) * std::exp(-grad[i * n + j] / epsilon);
                if (!std::isfinite(kernel(i, j))) {
                    finite = false;
                    break;
                }
            }

        Matrix next;
        bool ok = finite && sinkhorn_scale(kernel, mu_x, mu_y, sinkhorn_iters, next);
        if (!ok) {
            Matrix log_kernel(m, n);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    log_kernel(i, j) = std::log(mu.at(i, j)) - grad[i * n + j] / epsilon;
            if (!sinkhorn_log(log_kernel, mu_x, mu_y, sinkhorn_iters, next))
                fail(errc::numerical_underflow,
                     "entropic kernel underflowed even in log domain; increase epsilon");
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) mu.at(i, j) = next(i, j);
    }

    if (t > 0) mu = round_to_polytope(mu, mu_x, mu_y);
    result.coupling = mu;
    result.value = quad.value(mu.mu);
    result.distance = gw_distance(std::max(0.0, result.value), problem.p);
    result.iterations = t;
    result.fw_gap = gap_at(mu);
    result.history.push_back({t, result.value, result.fw_gap});
    return result;
}

SolveResult multistart(const GwProblem& problem, int k, std::uint64_t seed, int max_iter,
                       double tol) {
    if (k < 1) fail(errc::invalid_size, "multistart needs at least one start");
    const auto mu_x = problem.mu_x();
    const auto mu_y = problem.mu_y();

    Rng rng(seed);
    SolveResult best;
    bool have_best = false;
    for (int run = 0; run < k; ++run) {
        const Coupling start = (run == 0) ? independence_coupling(mu_x, mu_y)
                                          : random_feasible_coupling(mu_x, mu_y, rng);
        SolveResult r = frank_wolfe(problem, start, max_iter, tol);
        if (!have_best || r.value < best.value) {
            best = std::move(r);
            have_best = true;
        }
    }
    return best;
}

Coupling random_feasible_coupling(const std::vector<double>& mu_x,
                                  const std::vector<double>& mu_y, Rng& rng) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    Coupling plan;
    plan.m = m;
    plan.n = n;
    plan.mu.resize(m * n);
    // Exponential entries give well-spread couplings after projection; the
    // floor keeps every entry strictly positive so the scalings stay finite.
    for (auto& v : plan.mu) v = 1e-9 - std::log(1.0 - rng.uniform());

    std::vector<double> u(m, 1.0), v(n, 1.0);
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += plan.at(i, j) * v[j];
            u[i] = mu_x[i] / s;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += plan.at(i, j) * u[i];
            v[j] = mu_y[j] / s;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) plan.at(i, j) *= u[i] * v[j];
    return round_to_polytope(plan, mu_x, mu_y);
}

Coupling round_to_polytope(const Coupling& plan, const std::vector<double>& mu_x,
                           const std::vector<double>& mu_y) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    if (plan.m != m || plan.n != n)
        fail(errc::dimension_mismatch, "plan does not match the marginals");

    Coupling out = plan;
    for (double v : out.mu)
        if (!(v >= 0.0)) fail(errc::invalid_size, "plan entries must be nonnegative");

    for (std::size_t i = 0; i < m; ++i) {
        const double r = kernels::sum(out.mu.data() + i * n, n);
        if (r > mu_x[i] && r > 0.0) kernels::scale(mu_x[i] / r, out.mu.data() + i * n, n);
    }
    auto cols = col_marginals(out);
    for (std::size_t j = 0; j < n; ++j) {
        if (cols[j] > mu_y[j] && cols[j] > 0.0) {
            const double f = mu_y[j] / cols[j];
            for (std::size_t i = 0; i < m; ++i) out.at(i, j) *= f;
        }
    }

    const auto rows = row_marginals(out);
    cols = col_marginals(out);
    std::vector<double> err_r(m), err_c(n);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        err_r[i] = std::max(0.0, mu_x[i] - rows[i]);
        total += err_r[i];
    }
    for (std::size_t j = 0; j < n; ++j) err_c[j] = std::max(0.0, mu_y[j] - cols[j]);
    if (total > 0.0) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += err_r[i] * err_c[j] / total;
    }
    return out;
}

} // namespace gw
