#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "gw/gwcore.hpp"
#include "gw/matrix.hpp"
#include "gw/mmspace.hpp"
#include "gw/rng.hpp"

namespace gw::test {

// The worked 2x2 example used throughout: X is the two-point unit-distance
// space with the uniform measure, Y the same metric with measure (1/4, 3/4).
inline MetricMeasureSpace ex1_space_x() { return delta_space(2); }

inline MetricMeasureSpace ex1_space_y() {
    Matrix d(2, 2);
    d(0, 1) = 1.0;
    d(1, 0) = 1.0;
    return make_space(std::move(d), {0.25, 0.75});
}

inline Matrix ex1_gamma() {
    Matrix g(4, 4);
    const double vals[16] = {0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0};
    for (int i = 0; i < 16; ++i) g(static_cast<std::size_t>(i / 4), static_cast<std::size_t>(i % 4)) = vals[i];
    return g;
}

/// Random n-point space from a point cloud in the unit cube with a random
/// strictly positive measure. Euclidean metric, so the triangle inequality
/// holds by construction.
inline MetricMeasureSpace random_space(Rng& rng, std::size_t n, double min_mass = 0.2) {
    while (true) {
        std::vector<std::array<double, 3>> pts(n);
        for (auto& p : pts) p = {rng.uniform(), rng.uniform(), rng.uniform()};
        Matrix d(n, n, 0.0);
        bool distinct = true;
        for (std::size_t i = 0; i < n && distinct; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int c = 0; c < 3; ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
                const double v = std::sqrt(s);
                if (v == 0.0) {
                    distinct = false;
                    break;
                }
                d(i, j) = v;
                d(j, i) = v;
            }
        if (!distinct) continue;
        std::vector<double> mu(n);
        double total = 0.0;
        for (auto& w : mu) {
            w = rng.uniform(min_mass, 1.0);
            total += w;
        }
        for (auto& w : mu) w /= total;
        return make_space(std::move(d), std::move(mu));
    }
}

inline Curve3D random_curve(Rng& rng, std::size_t samples) {
    Curve3D curve;
    curve.samples.reserve(samples);
    std::array<double, 3> pos{0.0, 0.0, 0.0};
    curve.samples.push_back(pos);
    for (std::size_t i = 1; i < samples; ++i) {
        for (auto& c : pos) c += rng.uniform(-1.0, 1.0);
        pos[0] += 0.05; // guarantees consecutive samples differ
        curve.samples.push_back(pos);
    }
    return curve;
}

/// Exhaustive LP oracle over the transportation polytope: enumerates every
/// basic solution (spanning-tree support) and returns the minimum cost.
/// Practical for m, n <= 3.
inline double brute_force_transport(const Matrix& cost, const std::vector<double>& mu_x,
                                    const std::vector<double>& mu_y) {
    const std::size_t m = mu_x.size();
    const std::size_t n = mu_y.size();
    const std::size_t cells = m * n;
    const std::size_t basis_size = m + n - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> pick;
    const auto evaluate = [&]() {
        // Peel leaves to solve the flows on the candidate support.
        std::vector<double> need_row(mu_x), need_col(mu_y);
        std::vector<std::vector<std::size_t>> row_cells(m), col_cells(n);
        for (std::size_t c : pick) {
            row_cells[c / n].push_back(c);
            col_cells[c % n].push_back(c);
        }
        std::vector<double> flow(cells, 0.0);
        std::vector<char> used(pick.size() + cells, 0);
        std::vector<char> done(cells, 0);
        for (std::size_t round = 0; round < basis_size; ++round) {
            bool progress = false;
            for (std::size_t c : pick) {
                if (done[c]) continue;
                const std::size_t i = c / n;
                const std::size_t j = c % n;
                std::size_t open_row = 0, open_col = 0;
                for (std::size_t o : row_cells[i])
                    if (!done[o]) ++open_row;
                for (std::size_t o : col_cells[j])
                    if (!done[o]) ++open_col;
                if (open_row == 1) {
                    flow[c] = need_row[i];
                    need_row[i] = 0.0;
                    need_col[j] -= flow[c];
                    done[c] = 1;
                    progress = true;
                } else if (open_col == 1) {
                    flow[c] = need_col[j];
                    need_col[j] = 0.0;
                    need_row[i] -= flow[c];
                    done[c] = 1;
                    progress = true;
                }
            }
            if (!progress) break;
        }
        for (std::size_t c : pick)
            if (!done[c]) return; // support contains a cycle
        for (std::size_t c : pick)
            if (flow[c] < -1e-12) return; // infeasible vertex
        double value = 0.0;
        for (std::size_t c : pick) value += cost(c / n, c % n) * std::max(0.0, flow[c]);
        best = std::min(best, value);
    };

    // Enumerate all supports of size m+n-1.
    std::vector<std::size_t> idx(basis_size);
    const auto recurse = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
        if (depth == basis_size) {
            evaluate();
            return;
        }
        for (std::size_t c = from; c < cells; ++c) {
            pick.push_back(c);
            self(self, depth + 1, c + 1);
            pick.pop_back();
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

/// Symmetric matrix with a known spectrum: diag(d) conjugated by a product
/// of random plane rotations (an exactly orthogonal similarity).
inline Matrix random_similarity(const std::vector<double>& d, Rng& rng, std::size_t rotations) {
    const std::size_t k = d.size();
    Matrix a(k, k, 0.0);
    for (std::size_t i = 0; i < k; ++i) a(i, i) = d[i];
    for (std::size_t r = 0; r < rotations; ++r) {
        const std::size_t p = rng.below(k);
        std::size_t q = rng.below(k - 1);
        if (q >= p) ++q;
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // A <- G' A G on the (p,q) plane.
        for (std::size_t j = 0; j < k; ++j) {
            const double ap = a(p, j);
            const double aq = a(q, j);
            a(p, j) = c * ap - s * aq;
            a(q, j) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double ap = a(i, p);
            const double aq = a(i, q);
            a(i, p) = c * ap - s * aq;
            a(i, q) = s * ap + c * aq;
        }
    }
    // Symmetrize away the rounding skew.
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

} // namespace gw::test
