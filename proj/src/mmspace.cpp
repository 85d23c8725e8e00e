#include "gw/mmspace.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gw/errors.hpp"

namespace gw {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kTriangleTol = 1e-12;

std::size_t count_triangle_violations(const Matrix& d) {
    const std::size_t n = d.rows();
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d(i, k) > d(i, j) + d(j, k) + kTriangleTol) {
                    ++bad;
                    break;
                }
            }
        }
    return bad;
}

} // namespace

MetricMeasureSpace make_space(Matrix dist, std::vector<double> measure) {
    if (!dist.square()) fail(errc::dimension_mismatch, "distance matrix must be square");
    const std::size_t n = dist.rows();
    if (n == 0) fail(errc::invalid_size, "space must have at least one point");
    if (measure.size() != n)
        fail(errc::dimension_mismatch, "measure length does not match the number of points");

    for (std::size_t i = 0; i < n; ++i) {
        if (dist(i, i) != 0.0) fail(errc::nonzero_diagonal, "distance matrix has a nonzero diagonal entry");
        for (std::size_t k = 0; k < n; ++k) {
            if (dist(i, k) < 0.0) fail(errc::negative_distance, "distance matrix has a negative entry");
            if (dist(i, k) != dist(k, i)) fail(errc::asymmetric_distance, "distance matrix is not symmetric");
            if (i != k && dist(i, k) == 0.0)
                fail(errc::duplicate_points, "two distinct points are at distance zero");
        }
    }

    double total = 0.0;
    for (double w : measure) {
        if (w <= 0.0) fail(errc::measure_not_simplex, "measure entries must be strictly positive");
        total += w;
    }
    if (std::abs(total - 1.0) > kSimplexTol)
        fail(errc::measure_not_simplex, "measure entries must sum to 1");

    MetricMeasureSpace space;
    space.n_points = n;
    space.triangle_violations = count_triangle_violations(dist);
    space.dist = std::move(dist);
    space.measure = std::move(measure);
    return space;
}

MetricMeasureSpace delta_space(std::size_t n) {
    if (n == 0) fail(errc::invalid_size, "delta space needs at least one point");
    Matrix d(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
    std::vector<double> measure(n, 1.0 / static_cast<double>(n));
    return make_space(std::move(d), std::move(measure));
}

MetricMeasureSpace arc_length_space(const Curve3D& curve, std::optional<std::vector<double>> measure) {
    const std::size_t n = curve.samples.size();
    if (n < 2) fail(errc::invalid_size, "curve must have at least two samples");

    // Cumulative arc length along the sample order; distances are differences
    // of the cumulative values, which makes them additive along the curve.
    std::vector<double> arc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const auto& a = curve.samples[i - 1];
        const auto& b = curve.samples[i];
        const double dx = b[0] - a[0];
        const double dy = b[1] - a[1];
        const double dz = b[2] - a[2];
        const double seg = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (seg == 0.0) fail(errc::duplicate_consecutive_samples, "curve has two identical consecutive samples");
        arc[i] = arc[i - 1] + seg;
    }

    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = arc[j] - arc[i];
            d(i, j) = v;
            d(j, i) = v;
        }

    std::vector<double> mu = measure ? std::move(*measure)
                                     : std::vector<double>(n, 1.0 / static_cast<double>(n));
    return make_space(std::move(d), std::move(mu));
}

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::parse_error, "cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Tolerate trailing \r from CRLF files.
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            while (end && *end == ' ') ++end;
            if (end == begin || (end && *end != '\0'))
                fail(errc::parse_error,
                     path + ":" + std::to_string(lineno) + ": cannot parse value '" + cell + "'");
            row.push_back(v);
        }
        if (row.empty())
            fail(errc::parse_error, path + ":" + std::to_string(lineno) + ": empty row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(errc::parse_error, path + ": file contains no data rows");
    return rows;
}

void require_width(const std::vector<std::vector<double>>& rows, std::size_t width,
                   const std::string& path) {
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            fail(errc::parse_error, path + ":" + std::to_string(r + 1) + ": expected " +
                                        std::to_string(width) + " values, got " +
                                        std::to_string(rows[r].size()));
}

MetricMeasureSpace space_from_distance_rows(std::vector<std::vector<double>> rows,
                                            const std::string& path) {
    const std::size_t n = rows[0].size();
    if (rows.size() != n && rows.size() != n + 1)
        fail(errc::parse_error, path + ": expected " + std::to_string(n) + " matrix rows (plus an optional measure row), got " +
                                    std::to_string(rows.size()));
    require_width(rows, n, path);

    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = rows[i][j];

    std::vector<double> measure;
    if (rows.size() == n + 1)
        measure = rows[n];
    else
        measure.assign(n, 1.0 / static_cast<double>(n));
    return make_space(std::move(d), std::move(measure));
}

MetricMeasureSpace space_from_point_rows(const std::vector<std::vector<double>>& rows,
                                         const std::string& path) {
    const std::size_t dim = rows[0].size();
    require_width(rows, dim, path);
    const std::size_t n = rows.size();
    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = rows[i][c] - rows[j][c];
                s += diff * diff;
            }
            const double v = std::sqrt(s);
            d(i, j) = v;
            d(j, i) = v;
        }
    return make_space(std::move(d), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Curve3D curve_from_rows(const std::vector<std::vector<double>>& rows, const std::string& path) {
    require_width(rows, 3, path);
    Curve3D curve;
    curve.samples.reserve(rows.size());
    for (const auto& r : rows) curve.samples.push_back({r[0], r[1], r[2]});
    return curve;
}

} // namespace

MetricMeasureSpace load_space(const std::string& path, SpaceFormat format) {
    auto rows = read_csv_rows(path);
    switch (format) {
    case SpaceFormat::distance_matrix_csv: return space_from_distance_rows(std::move(rows), path);
    case SpaceFormat::point_cloud_csv: return space_from_point_rows(rows, path);
    case SpaceFormat::curve_csv: return arc_length_space(curve_from_rows(rows, path));
    }
    fail(errc::parse_error, "unknown space format");
}

Curve3D load_curve(const std::string& path) { return curve_from_rows(read_csv_rows(path), path); }

void write_curve_csv(const std::string& path, const Curve3D& curve) {
    std::ofstream out(path);
    if (!out) fail(errc::parse_error, "cannot open file for writing: " + path);
    out.precision(17);
    for (const auto& s : curve.samples) out << s[0] << "," << s[1] << "," << s[2] << "\n";
}

Curve3D subsample_curve(const Curve3D& curve, std::size_t count) {
    const std::size_t total = curve.samples.size();
    if (count < 2) fail(errc::invalid_size, "subsample count must be at least 2");
    if (count > total)
        fail(errc::invalid_size, "curve provides " + std::to_string(total) +
                                     " samples, need at least " + std::to_string(count));
    Curve3D out;
    out.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Even spacing by index, both endpoints kept. The stride is >= 1, so
        // rounded indices are strictly increasing.
        const double pos = static_cast<double>(i) * static_cast<double>(total - 1) /
                           static_cast<double>(count - 1);
        out.samples.push_back(curve.samples[static_cast<std::size_t>(std::llround(pos))]);
    }
    return out;
}

Curve3D standin_oscillator_curve(OscillatorRegime regime, std::size_t samples) {
    if (samples < 2) fail(errc::invalid_size, "need at least two samples");
    const double t_end = 8.0 * 3.14159265358979323846;
    Curve3D curve;
    curve.samples.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
        double r;
        if (regime == OscillatorRegime::stable)
            r = 0.9 * std::exp(-0.12 * t); // spiral into the equilibrium
        else
            r = 0.05 * std::exp(0.09 * t); // spiral away from it
        curve.samples.push_back({1.0 + r * std::cos(t),
                                 1.0 + r * std::sin(t),
                                 1.0 + 0.8 * r * std::cos(0.5 * t + 0.3)});
    }
    return curve;
}

} // namespace gw
