#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gw/mmspace.hpp"

namespace gw::cli {

/// One row of an eigenvalue-count sweep.
struct SweepRow {
    std::size_t n = 0;
    std::size_t matrix_dim = 0;
    std::size_t negative_count = 0;
    double min_eigenvalue = 0.0;
};

/// Fixes the first space to the m-point unit-distance space and varies the
/// second one over n = n_min..n_max.
std::vector<SweepRow> sweep_delta(std::size_t m, std::size_t n_min, std::size_t n_max, double p);

/// Arc-length spaces over two trajectories: the first subsampled to m points
/// once, the second to n = n_min..n_max points.
std::vector<SweepRow> sweep_curves(const Curve3D& curve_x, const Curve3D& curve_y, std::size_t m,
                                   std::size_t n_min, std::size_t n_max, double p);

/// Rank correlation with average ranks on ties.
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Header "n,matrix_dim,negative_count,min_eigenvalue" plus one row per entry.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct QapCheckOutcome {
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst_rel_error = 0.0;
};

/// Verifies constant + cross_term == squared-loss objective on seeded random
/// feasible couplings, at 1e-12 relative tolerance.
QapCheckOutcome qap_check(const MetricMeasureSpace& X, const MetricMeasureSpace& Y,
                          std::size_t trials, std::uint64_t seed);

/// Full command-line surface; returns the process exit code.
/// 0 success, 2 input/validation failure, 3 internal certificate violation,
/// 4 oracle unavailable, 5 identity-check failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gw::cli
