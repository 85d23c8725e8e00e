#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gw/errors.hpp"
#include "gw/spectral.hpp"
#include "helpers.hpp"

using namespace gw;

namespace {

// Spectrum of the p=1 objective matrix for the unit-distance family, derived
// from the Kronecker eigenstructure: m+n-2 once, m-2 with multiplicity n-1,
// n-2 with multiplicity m-1, and -2 with multiplicity (m-1)(n-1).
std::vector<double> delta_family_spectrum(std::size_t m, std::size_t n) {
    std::vector<double> ev;
    ev.reserve(m * n);
    ev.push_back(static_cast<double>(m + n) - 2.0);
    ev.insert(ev.end(), n - 1, static_cast<double>(m) - 2.0);
    ev.insert(ev.end(), m - 1, static_cast<double>(n) - 2.0);
    ev.insert(ev.end(), (m - 1) * (n - 1), -2.0);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace

TEST_CASE("eigenvalues of the worked 4x4 objective matrix") {
    const auto ev = eigenvalues_symmetric(test::ex1_gamma());
    REQUIRE(ev.size() == 4);
    CHECK(std::abs(ev[0] - (-2.0)) < 1e-10);
    CHECK(std::abs(ev[1]) < 1e-10);
    CHECK(std::abs(ev[2]) < 1e-10);
    CHECK(std::abs(ev[3] - 2.0) < 1e-10);
}

TEST_CASE("eigenvalues of diagonal matrices are exact") {
    CHECK(eigenvalues_symmetric(Matrix::identity(3)) == std::vector<double>{1.0, 1.0, 1.0});

    Matrix d(3, 3, 0.0);
    d(0, 0) = -1.0;
    d(2, 2) = 5.0;
    CHECK(eigenvalues_symmetric(d) == std::vector<double>{-1.0, 0.0, 5.0});

    // Above the Jacobi cutoff, the tridiagonal path must be exact too.
    const std::size_t k = kJacobiMaxDim + 50;
    Matrix big(k, k, 0.0);
    std::vector<double> expected(k);
    for (std::size_t i = 0; i < k; ++i) {
        big(i, i) = static_cast<double>(i) - 20.0;
        expected[i] = big(i, i);
    }
    std::sort(expected.begin(), expected.end());
    CHECK(eigenvalues_symmetric(big) == expected);
}

TEST_CASE("both eigensolver paths recover a planted spectrum") {
    Rng rng(41);
    for (std::size_t k : {5, 24, 60, 150}) {
        std::vector<double> planted(k);
        for (auto& v : planted) v = rng.uniform(-10.0, 10.0);
        const Matrix a = test::random_similarity(planted, rng, 8 * k);
        std::sort(planted.begin(), planted.end());
        double scale = 0.0;
        for (double v : planted) scale = std::max(scale, std::abs(v));

        for (const auto& ev : {eigenvalues_jacobi(a), eigenvalues_tridiagonal(a)}) {
            REQUIRE(ev.size() == k);
            for (std::size_t i = 0; i < k; ++i)
                CHECK(std::abs(ev[i] - planted[i]) <= 1e-9 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("jacobi and tridiagonal paths agree on random matrices") {
    Rng rng(42);
    for (std::size_t k : {3, 17, 40, 90}) {
        Matrix a(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = rng.uniform(-2.0, 2.0);
                a(i, j) = v;
                a(j, i) = v;
            }
        const auto ja = eigenvalues_jacobi(a);
        const auto tq = eigenvalues_tridiagonal(a);
        const double norm = a.frobenius_norm();
        for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(ja[i] - tq[i]) <= 1e-10 * norm);
    }
}

TEST_CASE("asymmetric input is rejected") {
    Matrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = 1.0 + 1e-9;
    CHECK_THROWS_AS(eigenvalues_symmetric(a), error);
    CHECK_THROWS_AS(eigenvalues_symmetric(Matrix(2, 3, 0.0)), error);
}

TEST_CASE("negative eigenvalue counts") {
    CHECK(count_negative(test::ex1_gamma()) == 1);
    CHECK(count_negative(Matrix(5, 5, 0.0)) == 0);

    const auto problem = build_problem(delta_space(2), delta_space(4), 1.0);
    CHECK(count_negative(problem.gamma) == 3);

    CHECK_THROWS_AS(count_negative(test::ex1_gamma(), 0.0), error);
}

TEST_CASE("unit-distance family spectrum matches the closed form") {
    for (std::size_t m = 2; m <= 12; ++m)
        for (std::size_t n = 2; n <= 12; ++n) {
            const auto problem = build_problem(delta_space(m), delta_space(n), 1.0);
            const auto ev = eigenvalues_symmetric(problem.gamma);
            const auto expected = delta_family_spectrum(m, n);
            REQUIRE(ev.size() == expected.size());
            for (std::size_t i = 0; i < ev.size(); ++i)
                CHECK(std::abs(ev[i] - expected[i]) <= 1e-8);
        }
}

TEST_CASE("2x2 principal minor equals minus the squared-scaled first distance") {
    const auto p1 = build_problem(test::ex1_space_x(), test::ex1_space_y(), 1.0);
    CHECK(principal_minor_2x2(p1) == -1.0);

    const auto p2 = build_problem(delta_space(2), delta_space(2), 2.0);
    CHECK(principal_minor_2x2(p2) == -1.0);

    Matrix d(2, 2);
    d(0, 1) = d(1, 0) = 3.0;
    const auto Y = make_space(d, {0.5, 0.5});
    const auto p3 = build_problem(delta_space(2), Y, 1.0);
    CHECK(principal_minor_2x2(p3) == doctest::Approx(-9.0).epsilon(1e-14));
    // Direct determinant of the displayed 2x2 block.
    CHECK(p3.gamma(0, 0) * p3.gamma(1, 1) - p3.gamma(0, 1) * p3.gamma(1, 0) ==
          doctest::Approx(-9.0).epsilon(1e-14));

    const auto one = make_space(Matrix(1, 1, 0.0), {1.0});
    const auto p4 = build_problem(delta_space(2), one, 1.0);
    CHECK_THROWS_AS(principal_minor_2x2(p4), error);
}

TEST_CASE("minor equals -d_Y(y1,y2)^(2p) on random instances") {
    Rng rng(44);
    for (int trial = 0; trial < 25; ++trial) {
        const auto X = test::random_space(rng, 2 + rng.below(4));
        const auto Y = test::random_space(rng, 2 + rng.below(4));
        const double p = 1.0 + rng.uniform();
        const auto problem = build_problem(X, Y, p);
        const double expected = -std::pow(Y.dist(0, 1), 2.0 * p);
        CHECK(principal_minor_2x2(problem) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("certificate on the worked example") {
    const auto report = certify_nonconvex(build_problem(test::ex1_space_x(), test::ex1_space_y(), 1.0));
    CHECK(report.negative_count == 1);
    CHECK(report.minor_det == -1.0);
    CHECK_FALSE(report.psd);
}

TEST_CASE("certificate counts for the 2-vs-50 unit-distance pair") {
    const auto report = certify_nonconvex(build_problem(delta_space(2), delta_space(50), 1.0));
    CHECK(report.negative_count == 49);
    CHECK_FALSE(report.psd);
}

TEST_CASE("certificate requires at least two points per space") {
    const auto one = make_space(Matrix(1, 1, 0.0), {1.0});
    CHECK_THROWS_AS(certify_nonconvex(build_problem(one, one, 1.0)), error);
}

TEST_CASE("spectral invariants: trace zero, Sylvester consistency") {
    Rng rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        const auto X = test::random_space(rng, 2 + rng.below(4));
        const auto Y = test::random_space(rng, 2 + rng.below(4));
        const auto problem = build_problem(X, Y, 1.0);
        const auto report = certify_nonconvex(problem);

        double trace_sum = 0.0;
        for (double v : report.eigenvalues) trace_sum += v;
        CHECK(std::abs(trace_sum) <= 1e-8 * std::max(1.0, problem.gamma.frobenius_norm()));

        // A negative principal minor forces a negative eigenvalue, and with
        // zero trace a positive one must exist too.
        CHECK(report.minor_det < 0.0);
        CHECK(report.eigenvalues.front() < 0.0);
        CHECK(report.eigenvalues.back() > 0.0);
        CHECK(report.negative_count + static_cast<std::size_t>(std::count_if(
                  report.eigenvalues.begin(), report.eigenvalues.end(),
                  [&](double v) { return v >= -report.tol; })) == report.eigenvalues.size());
    }
}

TEST_CASE("report serializes to the documented JSON shape") {
    const auto report = certify_nonconvex(build_problem(test::ex1_space_x(), test::ex1_space_y(), 1.0));
    std::ostringstream os;
    write_report_json(os, report);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["negative_count"] == 1);
    CHECK(j["minor_det"] == -1.0);
    CHECK(j["psd"] == false);
    CHECK(j["eigenvalues"].size() == 4);
}
