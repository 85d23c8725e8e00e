#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gw/gwcore.hpp"
#include "gw/rng.hpp"

namespace gw {

struct HistoryEntry {
    int iteration = 0;
    double value = 0.0;
    double gap = 0.0;
};

struct SolveResult {
    Coupling coupling;
    double value = 0.0;    // mu' gamma mu at the returned coupling
    double distance = 0.0; // half its p-th root
    int iterations = 0;
    double fw_gap = 0.0; // stationarity gap at the returned coupling
    std::vector<HistoryEntry> history;
};

/// Exact minimizer of sum_ij cost(i,j) * mu(i,j) over the transportation
/// polytope with the given marginals: a vertex found by the transportation
/// simplex (north-west corner start, Bland pivoting, ties by lowest flat
/// index).
Coupling ot_linear(const Matrix& cost, const std::vector<double>& mu_x,
                   const std::vector<double>& mu_y);

/// Conditional gradient with the exact transport oracle and closed-form line
/// search on the quadratic. Stops when the stationarity gap drops to tol or
/// after max_iter accepted steps. History values are non-increasing; an
/// update that fails to decrease the objective is rejected.
SolveResult frank_wolfe(const GwProblem& problem, const Coupling& init, int max_iter = 1000,
                        double tol = 1e-8);

/// Matrix-free variant running off any GammaOperator.
SolveResult frank_wolfe(const GammaOperator& op, const std::vector<double>& mu_x,
                        const std::vector<double>& mu_y, double p, const Coupling& init,
                        int max_iter = 1000, double tol = 1e-8);

/// Default entropic regularization strength: 0.05 * mean of the gamma
/// entries.
double default_epsilon(const GwProblem& problem);

/// Mirror descent on the entropic regularization: each outer step linearizes
/// the objective and Sinkhorn-projects kernel exp(-C/eps) ⊙ plan back to the
/// polytope (switching to log-domain scaling on underflow). Returns the
/// unregularized objective at the rounded final plan; fw_gap is the final
/// Frank-Wolfe gap for comparability.
SolveResult entropic_gw(const GwProblem& problem, double epsilon, int outer_iters = 200,
                        int sinkhorn_iters = 100,
                        const std::optional<Coupling>& init = std::nullopt);

/// Best of k Frank-Wolfe runs: the independence coupling plus k-1 seeded
/// random feasible starts. Deterministic given the seed; ties broken by the
/// lowest start index.
SolveResult multistart(const GwProblem& problem, int k, std::uint64_t seed, int max_iter = 1000,
                       double tol = 1e-8);

/// Entrywise-positive random matrix pushed onto the polytope: 200 Sinkhorn
/// scaling passes followed by an exact marginal-rounding step.
Coupling random_feasible_coupling(const std::vector<double>& mu_x,
                                  const std::vector<double>& mu_y, Rng& rng);

/// Rank-one rounding that restores the marginals of a nonnegative plan
/// exactly (up to roundoff).
Coupling round_to_polytope(const Coupling& plan, const std::vector<double>& mu_x,
                           const std::vector<double>& mu_y);

} // namespace gw
