#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gw/errors.hpp"
#include "gw/mmspace.hpp"
#include "helpers.hpp"

using namespace gw;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("gw_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("make_space accepts the worked two-point example") {
    Matrix d(2, 2);
    d(0, 1) = d(1, 0) = 1.0;
    const auto space = make_space(d, {0.5, 0.5});
    CHECK(space.n_points == 2);
    CHECK(space.dist(0, 1) == 1.0);
    CHECK(space.triangle_violations == 0);
}

TEST_CASE("make_space accepts a single point") {
    const auto space = make_space(Matrix(1, 1, 0.0), {1.0});
    CHECK(space.n_points == 1);
}

TEST_CASE("make_space rejects bad input") {
    Matrix ok(2, 2);
    ok(0, 1) = ok(1, 0) = 1.0;

    CHECK_THROWS_WITH_AS(make_space(ok, {0.6, 0.5}), doctest::Contains("sum to 1"), error);
    CHECK_THROWS_AS(make_space(ok, {1.0, 0.0}), error);

    Matrix asym = ok;
    asym(0, 1) = 2.0;
    try {
        make_space(asym, {0.5, 0.5});
        FAIL("expected an AsymmetricDistance error");
    } catch (const error& e) {
        CHECK(e.code() == errc::asymmetric_distance);
    }

    Matrix diag = ok;
    diag(1, 1) = 0.5;
    CHECK_THROWS_AS(make_space(diag, {0.5, 0.5}), error);

    Matrix neg = ok;
    neg(0, 1) = neg(1, 0) = -1.0;
    CHECK_THROWS_AS(make_space(neg, {0.5, 0.5}), error);

    CHECK_THROWS_AS(make_space(Matrix(2, 2, 0.0), {0.5, 0.5}), error); // duplicate points
    CHECK_THROWS_AS(make_space(Matrix(2, 3, 0.0), {0.5, 0.5}), error);
}

TEST_CASE("triangle violations are tolerated but counted") {
    Matrix d(3, 3);
    d(0, 1) = d(1, 0) = 1.0;
    d(1, 2) = d(2, 1) = 1.0;
    d(0, 2) = d(2, 0) = 3.0; // 3 > 1 + 1
    const auto space = make_space(d, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(space.triangle_violations > 0);
}

TEST_CASE("delta_space matches its definition") {
    const auto d2 = delta_space(2);
    CHECK(d2.dist(0, 1) == 1.0);
    CHECK(d2.measure[0] == 0.5);

    const auto d3 = delta_space(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(d3.dist(i, j) == (i == j ? 0.0 : 1.0));

    const auto d1 = delta_space(1);
    CHECK(d1.measure[0] == 1.0);

    CHECK_THROWS_AS(delta_space(0), error);

    // n(n-1) unit entries, n zeros.
    for (std::size_t n : {2, 5, 9}) {
        const auto s = delta_space(n);
        std::size_t ones = 0, zeros = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (s.dist(i, j) == 1.0) ++ones;
                if (s.dist(i, j) == 0.0) ++zeros;
            }
        CHECK(ones == n * (n - 1));
        CHECK(zeros == n);
    }
}

TEST_CASE("arc_length_space on collinear and bent curves") {
    Curve3D straight{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}};
    const auto s = arc_length_space(straight);
    CHECK(s.dist(0, 1) == doctest::Approx(1.0));
    CHECK(s.dist(0, 2) == doctest::Approx(2.0));
    CHECK(s.dist(1, 2) == doctest::Approx(1.0));

    Curve3D bent{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}};
    const auto b = arc_length_space(bent);
    CHECK(b.dist(0, 2) == doctest::Approx(2.0)); // two unit segments along the path
    CHECK(b.measure[0] == doctest::Approx(1.0 / 3));

    Curve3D dup{{{0, 0, 0}, {0, 0, 0}}};
    CHECK_THROWS_AS(arc_length_space(dup), error);
}

TEST_CASE("arc length dominates the straight-line distance") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto curve = test::random_curve(rng, 12);
        const auto space = arc_length_space(curve);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = 0; j < 12; ++j) {
                double s = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double d = curve.samples[i][c] - curve.samples[j][c];
                    s += d * d;
                }
                CHECK(space.dist(i, j) >= std::sqrt(s) - 1e-12);
            }
    }
}

TEST_CASE("arc length is additive along the curve") {
    Rng rng(12);
    const auto curve = test::random_curve(rng, 15);
    const auto space = arc_length_space(curve);
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = i; j < 15; ++j)
            for (std::size_t k = j; k < 15; ++k)
                CHECK(space.dist(i, k) ==
                      doctest::Approx(space.dist(i, j) + space.dist(j, k)).epsilon(1e-12));
}

TEST_CASE("distance-matrix CSV loading") {
    TempFile f("dist.csv", "0,1\n1,0\n0.5,0.5\n");
    const auto space = load_space(f.path, SpaceFormat::distance_matrix_csv);
    CHECK(space.n_points == 2);
    CHECK(space.dist(0, 1) == 1.0);
    CHECK(space.measure[0] == 0.5);

    TempFile uniform("dist_uniform.csv", "0,2\n2,0\n");
    const auto u = load_space(uniform.path, SpaceFormat::distance_matrix_csv);
    CHECK(u.measure[0] == 0.5);

    TempFile bad("dist_bad.csv", "0,1\n1\n");
    CHECK_THROWS_AS(load_space(bad.path, SpaceFormat::distance_matrix_csv), error);

    TempFile junk("dist_junk.csv", "0,x\n1,0\n");
    CHECK_THROWS_WITH_AS(load_space(junk.path, SpaceFormat::distance_matrix_csv),
                         doctest::Contains(":1:"), error);

    CHECK_THROWS_AS(load_space("definitely_missing_file.csv", SpaceFormat::distance_matrix_csv),
                    error);
}

TEST_CASE("point-cloud CSV loading builds Euclidean distances") {
    TempFile f("cloud.csv", "0,0,0\n3,4,0\n");
    const auto space = load_space(f.path, SpaceFormat::point_cloud_csv);
    CHECK(space.dist(0, 1) == doctest::Approx(5.0));
    CHECK(space.measure[1] == 0.5);

    // Dimension is inferred from the first row.
    TempFile planar("cloud2d.csv", "0,0\n3,4\n0,1\n");
    const auto flat = load_space(planar.path, SpaceFormat::point_cloud_csv);
    CHECK(flat.n_points == 3);
    CHECK(flat.dist(0, 1) == doctest::Approx(5.0));
    CHECK(flat.dist(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("curve CSV loading routes through arc length") {
    TempFile f("curve.csv", "0,0,0\n1,0,0\n1,1,0\n");
    const auto space = load_space(f.path, SpaceFormat::curve_csv);
    CHECK(space.dist(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("curve subsampling keeps endpoints and order") {
    Curve3D curve;
    for (int i = 0; i < 100; ++i)
        curve.samples.push_back({static_cast<double>(i), 0.0, 0.0});
    const auto sub = subsample_curve(curve, 10);
    CHECK(sub.samples.size() == 10);
    CHECK(sub.samples.front()[0] == 0.0);
    CHECK(sub.samples.back()[0] == 99.0);
    for (std::size_t i = 1; i < sub.samples.size(); ++i)
        CHECK(sub.samples[i][0] > sub.samples[i - 1][0]);

    CHECK_THROWS_AS(subsample_curve(sub, 50), error);
}

TEST_CASE("stand-in oscillator curves are valid inputs") {
    for (auto regime : {OscillatorRegime::stable, OscillatorRegime::unstable}) {
        const auto curve = standin_oscillator_curve(regime, 120);
        CHECK(curve.samples.size() == 120);
        const auto space = arc_length_space(subsample_curve(curve, 30));
        CHECK(space.n_points == 30);
    }
}
