#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gw/matrix.hpp"

namespace gw {

/// A finite metric-measure space: n points, a symmetric zero-diagonal
/// distance matrix, and a strictly positive probability vector. Immutable
/// after construction; make_space is the validating front door.
struct MetricMeasureSpace {
    std::size_t n_points = 0;
    Matrix dist;
    std::vector<double> measure;
    // Triangle-inequality violations are tolerated (the quadratic program is
    // well defined for any symmetric dissimilarity) but counted so callers
    // can warn.
    std::size_t triangle_violations = 0;
};

/// Ordered 3D samples of a parameterized curve; consecutive samples must be
/// distinct.
struct Curve3D {
    std::vector<std::array<double, 3>> samples;
};

/// Validates and builds a space. Throws gw::error with one of:
/// AsymmetricDistance, NonzeroDiagonal, NegativeDistance, DuplicatePoints,
/// MeasureNotSimplex.
MetricMeasureSpace make_space(Matrix dist, std::vector<double> measure);

/// The n-point space with all off-diagonal distances 1 and the uniform
/// measure.
MetricMeasureSpace delta_space(std::size_t n);

/// Space over the curve's samples under the arc length distance; measure
/// defaults to uniform.
MetricMeasureSpace arc_length_space(const Curve3D& curve,
                                    std::optional<std::vector<double>> measure = std::nullopt);

enum class SpaceFormat { distance_matrix_csv, point_cloud_csv, curve_csv };

/// Loads a space from a CSV file (see README for the three formats).
MetricMeasureSpace load_space(const std::string& path, SpaceFormat format);

/// Parses a curve CSV ("x,y,z" per row, no header).
Curve3D load_curve(const std::string& path);

void write_curve_csv(const std::string& path, const Curve3D& curve);

/// Keeps `count` samples at evenly spaced indices, first and last included.
Curve3D subsample_curve(const Curve3D& curve, std::size_t count);

enum class OscillatorRegime { stable, unstable };

/// Stand-in trajectory generator: a damped (stable) or slowly expanding
/// (unstable) 3D oscillation around the point (1,1,1), sampled uniformly in
/// t. This is a documented substitute for externally supplied trajectory
/// data; it exists so the curve sweep can run self-contained.
Curve3D standin_oscillator_curve(OscillatorRegime regime, std::size_t samples);

} // namespace gw
