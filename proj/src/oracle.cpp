#include "gw/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "gw/errors.hpp"
#include "gw/solvers.hpp"

namespace gw {

namespace {

constexpr double kFeasSlack = 1e-12;
constexpr std::size_t kPolishCandidates = 5;

double objective_at(const GwProblem& problem, const Coupling& c) { return objective(problem, c); }

} // namespace

OracleResult oracle_1dof(const GwProblem& problem) {
    if (problem.m != 2 || problem.n != 2)
        fail(errc::wrong_dimension, "closed-form oracle handles 2x2 instances only");

    const auto mu_x = problem.mu_x();
    const auto mu_y = problem.mu_y();
    const double lo = std::max(0.0, mu_x[0] + mu_y[0] - 1.0);
    const double hi = std::min(mu_x[0], mu_y[0]);

    const auto coupling_at = [&](double t) {
        Coupling c;
        c.m = 2;
        c.n = 2;
        c.mu = {t, mu_x[0] - t, mu_y[0] - t, mu_x[1] - mu_y[0] + t};
        for (auto& v : c.mu) v = std::max(0.0, v);
        return c;
    };

    // f(lo + s) = f(lo) + b s + a s^2 along the direction d = (1,-1,-1,1).
    const std::vector<double> d{1.0, -1.0, -1.0, 1.0};
    std::vector<double> gd(4, 0.0);
    DenseGammaOperator op(problem.gamma);
    op.matvec(d.data(), gd.data());
    double a = 0.0;
    for (int r = 0; r < 4; ++r) a += d[r] * gd[r];

    const Coupling at_lo = coupling_at(lo);
    std::vector<double> gmu(4, 0.0);
    op.matvec(at_lo.mu.data(), gmu.data());
    double b = 0.0;
    for (int r = 0; r < 4; ++r) b += 2.0 * gmu[r] * d[r];

    const double span = hi - lo;
    double best_s = 0.0;
    double best_q = 0.0; // q(0) relative to f(lo)
    const auto consider = [&](double s) {
        const double q = b * s + a * s * s;
        if (q < best_q) {
            best_q = q;
            best_s = s;
        }
    };
    consider(span);
    if (a > 0.0) {
        const double interior = -b / (2.0 * a);
        if (interior > 0.0 && interior < span) consider(interior);
    }

    OracleResult result;
    result.method = OracleMethod::closed_form_1dof;
    result.coupling = coupling_at(lo + best_s);
    result.value = objective_at(problem, result.coupling);
    return result;
}

OracleResult oracle_grid(const GwProblem& problem, int resolution) {
    const std::size_t m = problem.m;
    const std::size_t n = problem.n;
    const std::size_t dof = coupling_dof(m, n);
    if (dof > 4)
        fail(errc::too_many_dof, "grid oracle handles at most 4 coupling degrees of freedom");
    if (resolution < 10) fail(errc::resolution_too_small, "grid resolution must be at least 10");

    const auto mu_x = problem.mu_x();
    const auto mu_y = problem.mu_y();

    OracleResult result;
    result.method = OracleMethod::grid;
    result.grid_resolution = resolution;

    if (dof == 0) {
        // Single-point polytope: the independence coupling is the only plan.
        result.coupling = independence_coupling(mu_x, mu_y);
        result.value = objective_at(problem, result.coupling);
        return result;
    }

    // Free coordinates are the top-left (m-1) x (n-1) block of the plan.
    struct Axis {
        std::size_t i;
        std::size_t j;
        double step;
    };
    std::vector<Axis> axes;
    double h_sq = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double hi = std::min(mu_x[i], mu_y[j]);
            const double step = hi / static_cast<double>(resolution - 1);
            axes.push_back({i, j, step});
            h_sq += step * step;
        }
    result.error_bound = 2.0 * problem.gamma.frobenius_norm() * std::sqrt(h_sq);

    // Reconstructs the full plan from free coordinates; returns false when
    // any pivoted entry dips below the feasibility slack.
    Coupling plan;
    plan.m = m;
    plan.n = n;
    plan.mu.assign(m * n, 0.0);
    const auto reconstruct = [&](const std::vector<int>& idx) {
        for (std::size_t ax = 0; ax < axes.size(); ++ax)
            plan.at(axes[ax].i, axes[ax].j) = axes[ax].step * static_cast<double>(idx[ax]);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j + 1 < n; ++j) row += plan.at(i, j);
            const double rest = mu_x[i] - row;
            if (rest < -kFeasSlack) return false;
            plan.at(i, n - 1) = std::max(0.0, rest);
        }
        double last_row_total = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i + 1 < m; ++i) col += plan.at(i, j);
            const double rest = mu_y[j] - col;
            if (rest < -kFeasSlack) return false;
            plan.at(m - 1, j) = std::max(0.0, rest);
            last_row_total += plan.at(m - 1, j);
        }
        const double corner = mu_x[m - 1] - last_row_total;
        if (corner < -kFeasSlack) return false;
        plan.at(m - 1, n - 1) = std::max(0.0, corner);
        return true;
    };

    // Lexicographic odometer over the grid; the first point seen wins ties,
    // which makes the argmin deterministic.
    struct Candidate {
        double value;
        Coupling plan;
    };
    std::vector<Candidate> best;
    std::vector<int> idx(dof, 0);
    bool done = false;
    while (!done) {
        if (reconstruct(idx)) {
            const double v = objective_at(problem, plan);
            if (best.size() < kPolishCandidates || v < best.back().value) {
                const auto pos = std::upper_bound(best.begin(), best.end(), v,
                                                  [](double a, const Candidate& c) { return a < c.value; });
                best.insert(pos, {v, plan});
                if (best.size() > kPolishCandidates) best.pop_back();
            }
        }
        for (std::size_t ax = 0;; ++ax) {
            if (ax == dof) {
                done = true;
                break;
            }
            if (++idx[ax] < resolution) break;
            idx[ax] = 0;
        }
    }

    if (best.empty()) {
        // No grid point cleared the slack (possible only for extremely thin
        // polytopes); polish from the always-feasible independence coupling.
        best.push_back({0.0, independence_coupling(mu_x, mu_y)});
        best.back().value = objective_at(problem, best.back().plan);
    }

    bool have = false;
    SolveResult polished;
    for (const auto& cand : best) {
        const Coupling start = round_to_polytope(cand.plan, mu_x, mu_y);
        SolveResult r = frank_wolfe(problem, start, 1000, 1e-12);
        if (!have || r.value < polished.value) {
            polished = std::move(r);
            have = true;
        }
    }

    result.coupling = std::move(polished.coupling);
    result.value = polished.value;
    return result;
}

} // namespace gw
